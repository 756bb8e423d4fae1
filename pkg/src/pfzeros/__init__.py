"""Pfaffian point-process formulas for the zeros of the real Gaussian power series.

The series ``f(z) = sum_k a_k z^k`` with i.i.d. real standard Gaussian ``a_k``
has real zeros in (-1, 1) and complex zeros in conjugate pairs in the unit
disc.  This package evaluates the closed-form correlation functions and
moment formulas for those zeros and checks them against Monte Carlo.
"""

__version__ = "0.1.0"

from pfzeros.errors import (
    DuplicatePoints,
    EigensolveFailure,
    InsufficientSamples,
    InternalInconsistency,
    InvalidSubset,
    NearSingularCovariance,
    NotSkew,
    NotSymmetric,
    OrderTooLarge,
    PfzerosError,
    PointOnRealAxis,
    QuadratureFailure,
    TruncationTooCoarse,
)
from pfzeros.pfaffian import (
    determinant,
    hafnian,
    pfaffian,
    pfaffian_combinatorial,
    pfaffian_eliminate,
)

__all__ = [
    "__version__",
    "DuplicatePoints",
    "EigensolveFailure",
    "InsufficientSamples",
    "InternalInconsistency",
    "InvalidSubset",
    "NearSingularCovariance",
    "NotSkew",
    "NotSymmetric",
    "OrderTooLarge",
    "PfzerosError",
    "PointOnRealAxis",
    "QuadratureFailure",
    "TruncationTooCoarse",
    "determinant",
    "hafnian",
    "pfaffian",
    "pfaffian_combinatorial",
    "pfaffian_eliminate",
]
