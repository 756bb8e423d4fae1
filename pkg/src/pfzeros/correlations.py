"""Correlation functions of real and complex zeros and zero-count statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from pfzeros import kernels
from pfzeros.errors import DuplicatePoints, InternalInconsistency, QuadratureFailure
from pfzeros.pfaffian import determinant, hafnian, pfaffian

IMAG_RESIDUE_TOL = 1e-10
NEGATIVE_TOL = 1e-9
QUAD_TOL = 1e-8


@dataclass(frozen=True)
class CountStats:
    r: float
    mean: float
    variance: float


def _real_points(points, allow_coincident: bool) -> np.ndarray | None:
    """Validated points, or None when coincident points are allowed and present."""
    try:
        return kernels.real_config(points).array()
    except DuplicatePoints:
        if not allow_coincident:
            raise
        kernels.real_config(sorted(set(np.atleast_1d(points).tolist())))
        return None


def rho_real(points, kind: str = "K", allow_coincident: bool = False) -> float:
    """n-point correlation of real zeros, pi^-n pf(K(t_i, t_j)).

    ``kind="Kprime"`` uses the conjugated kernel; the value is the same.
    With ``allow_coincident`` a repeated point gives the continuous
    extension 0 instead of raising.
    """
    t = _real_points(points, allow_coincident)
    if t is None:
        return 0.0
    n = len(t)
    value = pfaffian(kernels.assemble_real(t, kind)) / math.pi**n
    if value < 0:
        scale = float(np.prod(rho1_closed(t)))
        if value < -NEGATIVE_TOL * scale:
            raise InternalInconsistency(f"negative correlation {value!r} at {t.tolist()}")
        value = 0.0
    return float(value)


def rho1_closed(s):
    """1 / (pi (1 - s^2))."""
    s = np.asarray(s, dtype=float)
    return 1.0 / (math.pi * (1.0 - s * s))


def rho2_closed(s: float, t: float) -> float:
    """Two-point function from the four kernel components (no Pfaffian)."""
    if s == t:
        return 0.0
    val = (
        kernels.k12(s, s) * kernels.k12(t, t)
        - kernels.k11(s, t) * kernels.k22(s, t)
        + kernels.k12(s, t) * kernels.k21(s, t)
    )
    return float(val) / math.pi**2


def normalized_pair_correlation(s, t):
    """R(s, t) = rho2 / (rho1 rho1) = 1 + |mu| c arcsin c - c^2."""
    cc = np.clip(kernels.c(s, t), 0.0, 1.0)
    return 1.0 + np.abs(kernels.mu(s, t)) * cc * np.arcsin(cc) - cc * cc


R = normalized_pair_correlation


def _check_complex_real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_RESIDUE_TOL * max(abs(value.real), 1e-300):
        raise InternalInconsistency(f"{what} has imaginary residue {value.imag!r} (real {value.real!r})")
    return value.real


def rho_complex(points) -> float:
    """n-point correlation of complex zeros in the upper half-disc.

    (pi i)^-n prod |1 - z_j^2|^-1 pf(Kc(z_i, z_j)); the imaginary residue of
    the quotient must vanish to relative 1e-10.
    """
    z = kernels.complex_config(points).array()
    n = len(z)
    pf = complex(pfaffian(kernels.assemble_complex(z, "Kc")))
    value = pf / ((math.pi * 1j) ** n * np.prod(np.abs(1.0 - z * z)))
    out = _check_complex_real(complex(value), "rho_complex")
    return max(out, 0.0)


def rho_complex_gram(points) -> float:
    """Same quantity through Gram matrices: (-1)^n det(Mhat) hf(Mhat) / (pi^n sqrt det M)."""
    z = kernels.complex_config(points).array()
    n = len(z)
    mhat = kernels.assemble_complex(z, "Mhat")
    m = kernels.assemble_complex(z, "M")
    det_m = _check_complex_real(complex(determinant(m)), "det M")
    num = (-1) ** n * complex(determinant(mhat)) * complex(hafnian(mhat))
    return _check_complex_real(num / (math.pi**n * math.sqrt(det_m)), "rho_complex_gram")


def rho1_complex_closed(z: complex) -> float:
    z = complex(z)
    return abs(z - z.conjugate()) / (math.pi * abs(1 - z * z) * (1 - abs(z) ** 2) ** 2)


def rho2_complex_closed(z: complex, w: complex) -> float:
    """Expanded 4x4 Pfaffian for two complex points."""
    z, w = complex(z), complex(w)
    wb = w.conjugate()
    same = abs((z - w) / (1 - z * w) ** 2) ** 2
    cross = abs((z - wb) / (1 - z * wb) ** 2) ** 2
    return rho1_complex_closed(z) * rho1_complex_closed(w) + (same - cross) / (
        math.pi**2 * abs(1 - z * z) * abs(1 - w * w)
    )


# --- zero counts -------------------------------------------------------------


def mean_count(r: float) -> float:
    """Expected number of real zeros in [-r, r]."""
    return math.log((1 + r) / (1 - r)) / math.pi


def integrated_mean_between(a: float, b: float) -> float:
    """Expected number of real zeros in [a, b]; rho1 integrates to artanh(t) / pi."""
    return (math.atanh(b) - math.atanh(a)) / math.pi


def variance_principal(r: float) -> float:
    """Leading terms of Var N_r; the true variance differs by a bounded amount."""
    return 2 / math.pi**2 * (
        math.pi * math.log((1 + r) / (1 - r)) - 2 * math.log((1 + r * r) / (1 - r * r))
    )


VARIANCE_SLOPE = 2 * (1 - 2 / math.pi)


def _quad(fn, a, b, **kw):
    val, err = integrate.quad(fn, a, b, epsabs=QUAD_TOL * 1e-2, epsrel=1e-11, limit=200, **kw)
    if not np.isfinite(val) or err > QUAD_TOL:
        raise QuadratureFailure(f"quadrature on [{a}, {b}] did not converge (error estimate {err:.3g})")
    return val, err


def integrated_mean(r: float) -> float:
    return _quad(rho1_closed, -r, r)[0]


def integrated_variance(r: float) -> float:
    """Var N_r = int rho1 + iint (rho2 - rho1 rho1) over [-r, r]^2.

    The connected part rho2 - rho1 rho1 = rho1 rho1 (R - 1) is kinked along
    s = t, so the square is split on the diagonal; by symmetry only the
    triangle t > s is integrated.
    """

    def inner(s):
        def g(t):
            return rho1_closed(s) * rho1_closed(t) * (normalized_pair_correlation(s, t) - 1.0)

        return _quad(g, s, r)[0]

    connected, _ = _quad(inner, -r, r)
    return integrated_mean(r) + 2.0 * connected


def count_stats(r: float, mode: str = "closed") -> CountStats:
    if not (0.0 < r < 1.0):
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    if mode == "closed":
        return CountStats(r, mean_count(r), variance_principal(r))
    if mode == "integrated":
        return CountStats(r, integrated_mean(r), integrated_variance(r))
    raise ValueError(f"unknown mode {mode!r}; expected 'closed' or 'integrated'")
