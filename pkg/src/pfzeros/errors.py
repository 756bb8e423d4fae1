"""Exception types.

Everything derives from :class:`PfzerosError`; input-validation errors also
derive from :class:`ValueError` so callers can catch them generically.
"""


class PfzerosError(Exception):
    pass


class NotSkew(PfzerosError, ValueError):
    pass


class NotSymmetric(PfzerosError, ValueError):
    pass


class OrderTooLarge(PfzerosError, ValueError):
    pass


class DuplicatePoints(PfzerosError, ValueError):
    pass


class PointOnRealAxis(PfzerosError, ValueError):
    pass


class InvalidSubset(PfzerosError, ValueError):
    pass


class TruncationTooCoarse(PfzerosError, ValueError):
    pass


class InsufficientSamples(PfzerosError, ValueError):
    pass


class NearSingularCovariance(PfzerosError, ArithmeticError):
    pass


class QuadratureFailure(PfzerosError, ArithmeticError):
    pass


class EigensolveFailure(PfzerosError, ArithmeticError):
    pass


class InternalInconsistency(PfzerosError, ArithmeticError):
    """A result violated a structural property it must satisfy (e.g. a
    correlation function came out with a non-negligible imaginary part)."""
