"""Deciding uniform versus pointwise convergence with trusted moduli.

Families of functions on N-infinity, Cantor space or [0, 1] come with a
pointwise modulus of convergence. The procedures here either certify uniform
convergence or produce witnesses against it, and turn such witnesses into a
decision for binary sequences. A modulus that lies is caught and refuted.
"""

__version__ = "0.1.0"
