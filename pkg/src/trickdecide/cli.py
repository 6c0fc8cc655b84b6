"""Command-line front end.

Every command prints one report (JSON by default) and exits with

* 0: a decision was reached and every certificate check passed,
* 2: a check failed; usually a modulus was refuted and the refutation is
  in the report,
* 1: the input could not be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Optional

from . import __version__
from .errors import TrickError
from .exact_real import as_real, certify_above, format_rational, from_rational, parse_rational, tent
from .fan import CantorFamily, SemiUniformCertificate, cor16_lift, prop15_uniformize
from .families import (build_family_and_exact_modulus, build_modulus, prop3_reduce, tent_context,
                       unsafe_tent_modulus)
from .spaces import finite_point, first_one_up_to, natinf_literal, parse_point, parse_stream
from .tricks_core import (ModulusRefutation, NonUniform, Uniform, Witness, WitnessStream,
                          check_uniform, lpo_extract, third_trick, validate_refutation,
                          validate_witness)
from .tricks_metric import (Close, MetricRefutation, natinf_context, point_literal,
                            third_trick_metric)

REPORT_VERSION = "1"
EXIT_OK, EXIT_INPUT, EXIT_REFUTED = 0, 1, 2


class InputError(Exception):
    pass


def _report(command: str, **fields) -> dict:
    report = {"version": REPORT_VERSION, "command": command, "certificates": [],
              "checks": {"passed": 0, "failed": 0}, "budgets": {}}
    report.update(fields)
    return report


def _tally(report: dict, ok: bool) -> None:
    report["checks"]["passed" if ok else "failed"] += 1


def _exit_code(report: dict) -> int:
    return EXIT_REFUTED if report["checks"]["failed"] or report.get("result") == "refuted" else EXIT_OK


def _load_family(args):
    spec = args.family
    fam, _ = build_family_and_exact_modulus(spec)
    return fam, build_modulus(args.modulus, spec)


def _witness_json(w: Witness) -> dict:
    return {"type": "witness", "n": w.n, "k": w.k, "point": natinf_literal(w.alpha), "value": w.value}


def _modulus_refutations(f, M, N: int, index_bound: int, depth_bound: int) -> list[ModulusRefutation]:
    """Counterexamples to Uniform(N) that also contradict the modulus."""
    out = []
    for i, name in check_uniform(N, f, index_bound, depth_bound):
        p = parse_point(name)
        if i >= M.at(p):
            out.append(ModulusRefutation(name, i, f.eval(i, p), M.at(p)))
    return out


# ---------------------------------------------------------------- commands

def cmd_run_third_trick(args) -> dict:
    f, M = _load_family(args)
    outcome = third_trick(f, M)
    report = _report("run-third-trick", branch=outcome.branch, family=f.spec, modulus=M.spec,
                     budgets={"witnesses": args.witnesses, "depth": args.depth})
    if isinstance(outcome, Uniform):
        report["N"] = outcome.N
        hi = outcome.N + args.depth
        bad = check_uniform(outcome.N, f, hi, hi)
        refutations = _modulus_refutations(f, M, outcome.N, hi, hi)
        report["certificates"] = [r.to_json() for r in refutations]
        report["counterexamples"] = [{"i": i, "point": p} for i, p in bad[:16]]
        _tally(report, not bad)
        for r in refutations:
            _tally(report, validate_refutation(r, f, M))
    else:
        for w in outcome.witnesses.take(args.witnesses, start=1):
            report["certificates"].append(_witness_json(w))
            _tally(report, validate_witness(w, f))
    return report


def _canonical_witnesses(f) -> Optional[WitnessStream]:
    """n -> the least active index i >= n at the point i, for indicator families."""
    spec = f.spec if isinstance(f.spec, dict) else {}
    if spec.get("kind") != "indicator":
        return None
    period, offset = int(spec.get("period", 1)), int(spec.get("offset", 0))

    def produce(n: int) -> Witness:
        i = n + (offset - n) % period
        return Witness(n, i, finite_point(i), f.eval(i, finite_point(i)))

    return WitnessStream(produce)


def cmd_lpo_mill(args) -> dict:
    f, M = _load_family(args)
    a = parse_stream(args.stream)
    outcome = third_trick(f, M)
    report = _report("lpo-mill", family=f.spec, modulus=M.spec, stream=args.stream,
                     trick_branch=outcome.branch, budgets={"budget": args.budget})
    if isinstance(outcome, NonUniform):
        ws, source = outcome.witnesses, "third_trick"
    else:
        ws, source = _canonical_witnesses(f), "canonical"
        if ws is None:
            raise InputError("the family converges uniformly under this modulus; no witnesses to mill")
    report["witness_source"] = source
    res = lpo_extract(ws, M, f, a, budget=args.budget)
    report["result"] = res.result
    if res.result == "exists":
        report["index"] = res.index
        _tally(report, a.query(res.index) == 1 and first_one_up_to(a, res.index + 1) == res.index)
    elif res.result == "all_zero":
        _tally(report, first_one_up_to(a, args.budget) is None)
    else:
        report["certificates"].append(res.certificate.to_json())
        _tally(report, validate_refutation(res.certificate, f, M))
    return report


def cmd_prop3(args) -> dict:
    a = parse_stream(args.stream)
    res = prop3_reduce(a, horizon=args.horizon, budget=args.budget)
    report = _report("prop3", stream=args.stream, result=res.result,
                     budgets={"horizon": args.horizon, "budget": args.budget})
    if res.result == "exists":
        report["index"] = res.index
        _tally(report, a.query(res.index) == 1 and first_one_up_to(a, res.index + 1) == res.index)
    elif res.result == "all_zero":
        _tally(report, first_one_up_to(a, args.budget) is None)
    else:
        cert = res.certificate.to_json()
        report["certificates"].append(cert)
        _tally(report, _validate_tent_refutation(cert, args.horizon))
    return report


def _metric_context(args):
    spec = args.family.strip()
    if spec == "tent" or spec.replace(" ", "") == '{"kind":"tent"}':
        return tent_context(args.horizon, args.epsilon), "dyadic01"
    f, M = _load_family(args)
    return natinf_context(f, M, args.epsilon), "natinf"


def _parse_metric_point(space: str, text: str):
    if space == "dyadic01":
        return from_rational(parse_rational(text))
    return parse_point(text)


def _probe_indices(lo: int, window: int) -> list[int]:
    """A window above lo plus powers of two past it, where tents peak."""
    idx = set(range(lo, lo + window + 1))
    idx.update(1 << j for j in range(lo + window + 1) if (1 << j) >= lo)
    return sorted(idx)


def cmd_run_metric(args) -> dict:
    ctx, space = _metric_context(args)
    eps = ctx.epsilon
    outcome = third_trick_metric(ctx)
    report = _report("run-metric", branch=outcome.branch, space=space, context=ctx.spec,
                     epsilon=format_rational(eps),
                     budgets={"witnesses": args.witnesses, "window": args.window, "horizon": args.horizon})
    if isinstance(outcome, Close):
        report["N"] = outcome.N
        for n in range(outcome.N, outcome.N + args.window + 1):
            xn = ctx.xs(n)
            for i in _probe_indices(outcome.N, args.window):
                lower = certify_above(ctx.family.gap(i, xn), eps, 64)
                if lower is None:
                    _tally(report, True)
                    continue
                _tally(report, False)
                bound = ctx.modulus(xn, eps)
                if i >= bound:
                    r = MetricRefutation(point_literal(ctx.domain, xn), i, bound, lower, eps)
                    if len(report["certificates"]) < 16:
                        report["certificates"].append(r.to_json())
    else:
        quarter = eps / 4
        for n in range(1, args.witnesses + 1):
            w = outcome.stream[n]
            lower = certify_above(ctx.family.gap(w.k, w.z), quarter)
            report["certificates"].append({
                "type": "metric_witness", "n": w.n, "k": w.k,
                "point": point_literal(ctx.domain, w.z), "threshold": format_rational(quarter),
                "lower": None if lower is None else format_rational(lower)})
            _tally(report, lower is not None and w.k >= n)
    return report


def _fan_problem(kind: str, cert_text: str):
    """(family or None for the interval demo, certificate) for a named fan family."""
    honest = {
        "halving": lambda a: (3, 1) if a.query(0) == 0 else (4, 1),
        "constant": lambda a: (0, 0),
        "scale": lambda a: (3, 0),
    }
    families = {
        "halving": CantorFamily(lambda n, a: from_rational(Fraction(1 + a.query(0), 2 ** n)),
                                lambda a: from_rational(0), spec="halving"),
        "bit": CantorFamily(lambda n, a: from_rational(a.query(n)), lambda a: from_rational(0), spec="bit"),
        "constant": CantorFamily(lambda n, a: from_rational(Fraction(1, 3)),
                                 lambda a: from_rational(Fraction(1, 3)), spec="constant"),
        "scale": None,
    }
    if kind not in families:
        raise InputError(f"unknown fan family {kind!r}; expected one of {sorted(families)}")
    if cert_text == "honest":
        if kind not in honest:
            raise InputError(f"family {kind!r} has no honest certificate; pass --cert const:N:D")
        at = honest[kind]
    elif cert_text.startswith("const:"):
        try:
            N, d = (int(t) for t in cert_text[6:].split(":"))
        except ValueError:
            raise InputError(f"bad certificate {cert_text!r}") from None
        at = lambda a: (N, d)
    else:
        raise InputError(f"bad certificate {cert_text!r}")
    return families[kind], SemiUniformCertificate(at, spec=cert_text)


def cmd_fan_uniformize(args) -> dict:
    fam, cert = _fan_problem(args.family, args.cert)
    if fam is None:
        M, body = cor16_lift(lambda n, x: as_real(x).scale(Fraction(1, 2 ** n)), lambda x: from_rational(0),
                             cert, args.epsilon, depth=args.depth, window=args.window, seed=args.seed)
    else:
        M, body = prop15_uniformize(fam, cert, args.epsilon, depth=args.depth, window=args.window,
                                    seed=args.seed)
    report = _report("fan-uniformize", family=args.family, certificate=args.cert)
    report.update(body)
    checks = dict(body["checks"])
    for extra in ("in_S", "grid"):
        if extra in body:
            checks["passed"] += body[extra]["passed"]
            checks["failed"] += body[extra]["failed"]
    report["checks"] = checks
    report["budgets"]["seed"] = args.seed
    return report


def _validate_tent_refutation(cert: dict, horizon: int) -> bool:
    z = parse_rational(cert["point"])
    value = tent(cert["j"], z)
    bound = unsafe_tent_modulus(horizon)(from_rational(z), Fraction(1, 2))
    return value >= Fraction(1, 2) and value == parse_rational(cert["value"]) and cert["j"] >= bound


def validate_certificate(cert: dict, args) -> bool:
    kind = cert.get("type")
    if kind == "tent_refutation":
        return _validate_tent_refutation(cert, args.horizon)
    if kind in ("metric_refutation", "metric_witness"):
        ctx, space = _metric_context(args)
        p = _parse_metric_point(space, cert["point"])
        threshold = parse_rational(cert["threshold"])
        j = cert["j"] if kind == "metric_refutation" else cert["k"]
        if certify_above(ctx.family.gap(j, p), threshold) is None:
            return False
        if kind == "metric_refutation":
            return j >= ctx.modulus(p, threshold)
        near = certify_above(ctx.domain.distance(p, ctx.x), Fraction(1, 2 ** cert["n"]))
        return j >= cert["n"] and near is None
    f, M = _load_family(args)
    if kind == "modulus_refutation":
        return validate_refutation(ModulusRefutation(cert["point"], cert["j"], cert["value"], cert["bound"]), f, M)
    if kind == "witness":
        p = parse_point(cert["point"])
        w = Witness(cert["n"], cert["k"], p, cert["value"])
        return validate_witness(w, f) and f.eval(w.k, p) == w.value
    raise InputError(f"unknown certificate type {kind!r}")


def cmd_validate_certificate(args) -> dict:
    text = args.certificate
    if text == "-":
        text = sys.stdin.read()
    elif not text.lstrip().startswith(("{", "[")):
        with open(text) as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"certificate is not valid JSON: {exc}") from None
    if isinstance(data, dict) and "certificates" in data:
        data = data["certificates"]
    certs = data if isinstance(data, list) else [data]
    report = _report("validate-certificate")
    for cert in certs:
        ok = validate_certificate(cert, args)
        report["certificates"].append({"certificate": cert, "valid": ok})
        _tally(report, ok)
    return report


# ---------------------------------------------------------------- plumbing

def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _rational(text: str) -> Fraction:
    try:
        q = parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return q


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trickdecide", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family="indicator", modulus="heuristic:64"):
        p.add_argument("--family", default=family, help="kind name, JSON spec or random:SEED")
        p.add_argument("--modulus", default=modulus, help='"exact" or "heuristic:DEPTH"')
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run-third-trick", help="uniform bound or non-uniformity witnesses")
    common(p)
    p.add_argument("--witnesses", type=_positive, default=16)
    p.add_argument("--depth", type=_positive, default=16, help="brute-force margin for Uniform checks")
    p.set_defaults(run=cmd_run_third_trick)

    p = sub.add_parser("run-metric", help="metric version: Close(N) or witnesses")
    common(p)
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    p.add_argument("--horizon", type=_positive, default=64)
    p.add_argument("--witnesses", type=_positive, default=12)
    p.add_argument("--window", type=_positive, default=10)
    p.set_defaults(run=cmd_run_metric)

    p = sub.add_parser("lpo-mill", help="decide a stream from witnesses and a modulus")
    common(p)
    p.add_argument("--stream", required=True, help="zero, 0^k'1, stream:0^k1 or stream:bits:...")
    p.add_argument("--budget", type=_positive, default=256)
    p.set_defaults(run=cmd_lpo_mill)

    p = sub.add_parser("prop3", help="decide a stream through the tent family")
    p.add_argument("--stream", required=True)
    p.add_argument("--horizon", type=_positive, default=64)
    p.add_argument("--budget", type=_positive, default=256)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(run=cmd_prop3)

    p = sub.add_parser("fan-uniformize", help="uniform bound from a semi-uniform certificate")
    p.add_argument("--family", default="halving", help="halving, bit, constant or scale")
    p.add_argument("--cert", default="honest", help='"honest" or const:N:D')
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 4))
    p.add_argument("--depth", type=_positive, default=10)
    p.add_argument("--window", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(run=cmd_fan_uniformize)

    p = sub.add_parser("validate-certificate", help="re-check certificates from a report")
    common(p)
    p.add_argument("--certificate", required=True, help="JSON text, a file path, or - for stdin")
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    p.add_argument("--horizon", type=_positive, default=64)
    p.set_defaults(run=cmd_validate_certificate)
    return parser


def _jsonable(obj: Any):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=_jsonable)
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True, default=_jsonable)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.run(args)
    except (InputError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TrickError as exc:
        report = _report(args.command, error=type(exc).__name__, detail=str(exc))
        report["checks"]["failed"] += 1
    print(render(report, getattr(args, "format", "json")))
    return _exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
