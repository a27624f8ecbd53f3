"""Exact Poisson cohomology of the SU(2)-covariant necklace structures on S^2."""

from __future__ import annotations

__version__ = "0.1.0"

from .calculus import (
    CONVENTIONS,
    DiffForm,
    Multivector,
    d_pi,
    modular_field,
    schouten,
    wedge,
)
from .polys import Poly, RatFunc, poly_arith, poly_gcd, ratfunc_simplify
from .scalars import Scalar, parse_scalar

__all__ = [
    "CONVENTIONS",
    "DiffForm",
    "Multivector",
    "Poly",
    "RatFunc",
    "Scalar",
    "__version__",
    "d_pi",
    "modular_field",
    "parse_scalar",
    "poly_arith",
    "poly_gcd",
    "ratfunc_simplify",
    "schouten",
    "wedge",
]
