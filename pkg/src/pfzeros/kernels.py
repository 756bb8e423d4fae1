"""Scalar kernels and the structured matrices built from them.

Real points live in (-1, 1); complex points in the open upper half-disc.
All kernel functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from pfzeros.errors import DuplicatePoints, InvalidSubset, PointOnRealAxis

IMAG_TOL = 1e-12
ARCSIN_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class RealConfig:
    """Distinct points in (-1, 1)."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(t) for t in self.points)
        object.__setattr__(self, "points", pts)
        for t in pts:
            if not (-1.0 < t < 1.0):
                raise ValueError(f"real point {t!r} is outside (-1, 1)")
        if len(set(pts)) != len(pts):
            raise DuplicatePoints(f"points must be pairwise distinct: {pts}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_sorted(self) -> bool:
        return all(a < b for a, b in zip(self.points, self.points[1:]))

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)


@dataclass(frozen=True)
class ComplexConfig:
    """Distinct points in the open upper half of the unit disc."""

    points: tuple[complex, ...]

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        object.__setattr__(self, "points", pts)
        for z in pts:
            if abs(z) >= 1.0:
                raise ValueError(f"complex point {z!r} is outside the unit disc")
            if z.imag <= IMAG_TOL:
                raise PointOnRealAxis(f"complex point {z!r} must have Im z > {IMAG_TOL}")
        if len(set(pts)) != len(pts):
            raise DuplicatePoints(f"points must be pairwise distinct: {pts}")

    def __len__(self) -> int:
        return len(self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)


def real_config(points) -> RealConfig:
    if isinstance(points, RealConfig):
        return points
    return RealConfig(tuple(np.atleast_1d(np.asarray(points, dtype=float)).tolist()))


def complex_config(points) -> ComplexConfig:
    if isinstance(points, ComplexConfig):
        return points
    return ComplexConfig(tuple(np.atleast_1d(np.asarray(points, dtype=complex)).tolist()))


# --- scalar kernels -------------------------------------------------------


def sigma(s, t):
    """Covariance of f(s) and f(t): 1 / (1 - s t)."""
    return 1.0 / (1.0 - np.multiply(s, t))


def mu(s, t):
    """Disc automorphism (s - t) / (1 - s t); also valid for complex input."""
    return (np.subtract(s, t)) / (1.0 - np.multiply(s, t))


def c(s, t):
    """Correlation coefficient of f(s) and f(t)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.sqrt((1.0 - s * s) * (1.0 - t * t)) / (1.0 - s * t)


def _arcsin_c(s, t):
    cc = c(s, t)
    over = np.max(cc - 1.0, initial=0.0)
    if over > ARCSIN_CLAMP_TOL:
        raise FloatingPointError(f"correlation coefficient exceeds 1 by {over:.3g}")
    return np.arcsin(np.clip(cc, -1.0, 1.0))


@dataclass(frozen=True)
class KernelBlock:
    k11: float
    k12: float
    k21: float
    k22: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.k11, self.k12], [self.k21, self.k22]])


def k11(s, t):
    s, t = np.asarray(s, float), np.asarray(t, float)
    return (s - t) / (np.sqrt((1 - s * s) * (1 - t * t)) * (1 - s * t) ** 2)


def k12(s, t):
    s, t = np.asarray(s, float), np.asarray(t, float)
    return np.sqrt((1 - t * t) / (1 - s * s)) / (1 - s * t)


def k21(s, t):
    s, t = np.asarray(s, float), np.asarray(t, float)
    return -np.sqrt((1 - s * s) / (1 - t * t)) / (1 - s * t)


def k22(s, t):
    s, t = np.asarray(s, float), np.asarray(t, float)
    return np.sign(t - s) * _arcsin_c(s, t)


def kp11(s, t):
    s, t = np.asarray(s, float), np.asarray(t, float)
    return (s - t) / (1 - s * t) ** 2


def kp12(s, t):
    return 1.0 / (1.0 - np.multiply(s, t))


def kp21(s, t):
    return -1.0 / (1.0 - np.multiply(s, t))


def kp22(s, t):
    s, t = np.asarray(s, float), np.asarray(t, float)
    return np.sign(t - s) * _arcsin_c(s, t) / np.sqrt((1 - s * s) * (1 - t * t))


_KINDS = {
    "K": (k11, k12, k21, k22),
    "Kprime": (kp11, kp12, kp21, kp22),
}


def kernel_block(s: float, t: float, kind: str = "K") -> KernelBlock:
    """The 2x2 block K(s, t) (or the conjugated variant ``Kprime``)."""
    try:
        fns = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown kernel kind {kind!r}; expected one of {sorted(_KINDS)}")
    return KernelBlock(*(float(fn(s, t)) for fn in fns))


def _skew_from_upper(full: np.ndarray) -> np.ndarray:
    # use the upper triangle only so the result is exactly skew
    upper = np.triu(full, 1)
    return upper - upper.T


def assemble_real(cfg, kind: str = "K") -> np.ndarray:
    """The 2n x 2n skew matrix (K(t_i, t_j)), row ``2i + a`` for point i, component a."""
    t = real_config(cfg).array()
    f11, f12, f21, f22 = _KINDS[kind]
    s_, t_ = np.meshgrid(t, t, indexing="ij")
    n = len(t)
    out = np.empty((2 * n, 2 * n))
    out[0::2, 0::2] = f11(s_, t_)
    out[0::2, 1::2] = f12(s_, t_)
    out[1::2, 0::2] = f21(s_, t_)
    out[1::2, 1::2] = f22(s_, t_)
    return _skew_from_upper(out)


def q_conjugation(cfg) -> np.ndarray:
    """Block-diagonal diag(sqrt(1 - t^2), 1/sqrt(1 - t^2)) mapping K to Kprime."""
    t = real_config(cfg).array()
    w = np.sqrt(1.0 - t * t)
    d = np.empty(2 * len(t))
    d[0::2] = w
    d[1::2] = 1.0 / w
    return np.diag(d)


def sgn_kernel_matrix(cfg) -> np.ndarray:
    """The 2n x 2n matrix (K22(t_i, t_j)) of a single-component kernel."""
    t = real_config(cfg).array()
    s_, t_ = np.meshgrid(t, t, indexing="ij")
    return _skew_from_upper(k22(s_, t_))


def assemble_L(cfg, subset: Iterable[int]) -> np.ndarray:
    """The one-row-per-point skew matrix L^I mixing the four kernel components.

    ``subset`` holds 0-based point indices.  Entry (i, j) is K11 when both
    indices are in the subset, K22 when neither is, and K12 / K21 otherwise
    (K12 when the row index is the member).
    """
    t = real_config(cfg).array()
    n = len(t)
    if n % 2:
        raise ValueError("L^I is defined for an even number of points")
    members = set(int(i) for i in subset)
    if not members <= set(range(n)):
        raise InvalidSubset(f"subset {sorted(members)} is not inside range({n})")
    inside = np.zeros(n, dtype=bool)
    inside[list(members)] = True
    s_, t_ = np.meshgrid(t, t, indexing="ij")
    ri, cj = np.meshgrid(inside, inside, indexing="ij")
    out = np.where(
        ri & cj,
        k11(s_, t_),
        np.where(ri & ~cj, k12(s_, t_), np.where(~ri & cj, k21(s_, t_), k22(s_, t_))),
    )
    return _skew_from_upper(out)


def assemble_L_prefix(cfg, k: int) -> np.ndarray:
    """L^[k]: the subset is the first ``k`` points."""
    return assemble_L(cfg, range(k))


# --- Cauchy-type products ----------------------------------------------------


def cauchy_matrix(x, y=None) -> np.ndarray:
    x = np.asarray(x)
    y = x if y is None else np.asarray(y)
    return 1.0 / (1.0 - np.multiply.outer(x, y))


def cauchy_product(x, y=None):
    """Closed product form of det(1 / (1 - x_i y_j))."""
    x = np.asarray(x)
    y = x if y is None else np.asarray(y)
    n = len(x)
    num = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            num = num * (x[i] - x[j]) * (y[i] - y[j])
    return num / np.prod(1.0 - np.multiply.outer(x, y))


def _check_distinct(x: Sequence) -> None:
    if len(set(complex(v) for v in x)) != len(x):
        raise DuplicatePoints("points must be pairwise distinct")


def q_factors(x) -> np.ndarray:
    """q_i(x) = 1/(1 - x_i^2) * prod_{k != i} (x_i - x_k) / (1 - x_i x_k)."""
    x = np.asarray(x)
    _check_distinct(x)
    n = len(x)
    out = []
    for i in range(n):
        val = 1.0 / (1.0 - x[i] ** 2)
        for k in range(n):
            if k != i:
                val = val * mu(x[i], x[k])
        out.append(val)
    return np.array(out)


def q_products(x):
    """Product of the q_i; equals (-1)^(n(n-1)/2) det(1/(1 - x_i x_j))."""
    return np.prod(q_factors(x))


def mu_product(x):
    """prod_{i<j} (x_i - x_j) / (1 - x_i x_j)."""
    x = np.asarray(x)
    n = len(x)
    out = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            out = out * mu(x[i], x[j])
    return out


def schur_matrix(x) -> np.ndarray:
    x = np.asarray(x)
    return mu(x[:, None], x[None, :])


def pfaffian_hafnian_matrix(x) -> np.ndarray:
    """((x_i - x_j) / (1 - x_i x_j)^2), the Pfaffian side of the Pf-Hf identity."""
    x = np.asarray(x)
    d = np.subtract.outer(x, x)
    return d / (1.0 - np.multiply.outer(x, x)) ** 2


def covariance_matrix(cfg) -> np.ndarray:
    t = real_config(cfg).array()
    return sigma(t[:, None], t[None, :])


def conditional_covariance(x, y, t):
    """Covariance of f(x), f(y) given f(t) = 0, by Gaussian conditioning."""
    return sigma(x, y) - sigma(x, t) * sigma(t, y) / sigma(t, t)


# --- complex kernels ---------------------------------------------------------


def kc_block(z: complex, w: complex) -> np.ndarray:
    zb, wb = np.conj(z), np.conj(w)
    return np.array(
        [
            [(z - w) / (1 - z * w) ** 2, (z - wb) / (1 - z * wb) ** 2],
            [(zb - w) / (1 - zb * w) ** 2, (zb - wb) / (1 - zb * wb) ** 2],
        ]
    )


def extended_points(cfg) -> np.ndarray:
    """(z_1, ..., z_n, conj z_1, ..., conj z_n)."""
    z = complex_config(cfg).array()
    return np.concatenate([z, np.conj(z)])


def assemble_complex(cfg, which: str = "Kc") -> np.ndarray:
    """Complex kernel matrices.

    ``Kc`` is the 2n x 2n skew matrix of blocks Kc(z_i, z_j).  ``M`` and
    ``Mhat`` are the Gram matrices 1/(1 - x_i conj x_j) and 1/(1 - x_i x_j)
    over the extended points (z, conj z).
    """
    z = complex_config(cfg).array()
    if which == "Kc":
        x = np.empty(2 * len(z), dtype=complex)
        x[0::2] = z
        x[1::2] = np.conj(z)
        return _skew_from_upper(pfaffian_hafnian_matrix(x))
    x = np.concatenate([z, np.conj(z)])
    if which == "M":
        return 1.0 / (1.0 - np.multiply.outer(x, np.conj(x)))
    if which == "Mhat":
        return 1.0 / (1.0 - np.multiply.outer(x, x))
    raise ValueError(f"unknown complex matrix {which!r}; expected Kc, M or Mhat")


def complex_gram_block(z: complex, w: complex, scale=None) -> np.ndarray:
    """2x2 matrix of second moments of (f(z), conj f(z)) against (f(w), conj f(w)).

    Rows: [E f(z) conj f(w), E f(z) f(w)], [E conj(f(z) f(w)), E conj f(z) f(w)].
    With ``scale`` the moments are those of ``scale(.) * f``.
    """
    a_z = 1.0 if scale is None else scale(z)
    a_w = 1.0 if scale is None else scale(w)
    zb, wb = np.conj(z), np.conj(w)
    return np.array(
        [
            [a_z * np.conj(a_w) / (1 - z * wb), a_z * a_w / (1 - z * w)],
            [np.conj(a_z * a_w) / (1 - zb * wb), np.conj(a_z) * a_w / (1 - zb * w)],
        ]
    )


def conditional_complex_gram(z: complex, w: complex, eta: complex) -> np.ndarray:
    """Schur complement M(z,w) - M(z,eta) M(eta,eta)^{-1} M(eta,w)."""
    m_ze = complex_gram_block(z, eta)
    m_ee = complex_gram_block(eta, eta)
    m_ew = complex_gram_block(eta, w)
    return complex_gram_block(z, w) - m_ze @ np.linalg.solve(m_ee, m_ew)


def zero_conditioned_scale(eta: complex):
    """z -> mu(z, eta) mu(z, conj eta), the factor that realises f | f(eta) = 0."""
    return lambda z: mu(z, eta) * mu(z, np.conj(eta))
