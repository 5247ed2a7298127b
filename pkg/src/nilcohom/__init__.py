"""Exact cohomology computations for nilpotent Lie algebras over QQ and QQ(t)."""

from .scalar import QQ, QQt, Poly, RatFunc, parse_scalar
from .linalg import Matrix, Subspace
from .lie import LieAlgebra

__version__ = "0.1.0"
