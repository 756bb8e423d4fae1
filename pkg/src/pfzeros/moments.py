"""Product moments of f at real points, plus the complex second-moment hafnian."""

from __future__ import annotations

import math

import numpy as np

from pfzeros import kernels
from pfzeros.correlations import _check_complex_real
from pfzeros.errors import NearSingularCovariance
from pfzeros.pfaffian import hafnian, pfaffian


def covariance_cholesky(points) -> np.ndarray:
    """Lower Cholesky factor of Sigma(t) = (1 / (1 - t_i t_j))."""
    cov = kernels.covariance_matrix(points)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NearSingularCovariance(f"covariance at {list(points)} is not numerically positive-definite") from exc


def covariance_det(points) -> float:
    chol = covariance_cholesky(points)
    return float(np.prod(np.diag(chol)) ** 2)


def abs_moment(points) -> float:
    """E|f(t_1) ... f(t_n)| = (2/pi)^(n/2) det(Sigma)^(-1/2) pf(K(t_i, t_j))."""
    cfg = kernels.real_config(points)
    n = len(cfg)
    pf = pfaffian(kernels.assemble_real(cfg))
    return (2 / math.pi) ** (n / 2) * pf / math.sqrt(covariance_det(cfg.points))


def inversion_sign(values) -> int:
    """prod_{i<j} sgn(v_j - v_i) for distinct values, via the inversion count."""
    v = list(values)
    inv = sum(1 for i in range(len(v)) for j in range(i + 1, len(v)) if v[j] < v[i])
    return -1 if inv % 2 else 1


def sgn_moment(points) -> float:
    """E[sgn f(t_1) ... sgn f(t_m)]; zero for odd m.

    For m = 2n: (2/pi)^n prod_{i<j} sgn(t_j - t_i) pf(K22(t_i, t_j)).
    """
    cfg = kernels.real_config(points)
    m = len(cfg)
    if m % 2:
        return 0.0
    pf = pfaffian(kernels.sgn_kernel_matrix(cfg))
    return (2 / math.pi) ** (m // 2) * inversion_sign(cfg.points) * pf


def sgn_moment_sorted(points) -> float:
    """Sorted-input form (2/pi)^n pf(arcsin c(t_i, t_j))_{i<j}."""
    cfg = kernels.real_config(points)
    if not cfg.is_sorted:
        raise ValueError("points must be strictly increasing")
    m = len(cfg)
    if m % 2:
        return 0.0
    t = cfg.array()
    upper = np.triu(np.arcsin(np.clip(kernels.c(t[:, None], t[None, :]), -1, 1)), 1)
    return (2 / math.pi) ** (m // 2) * pfaffian(upper - upper.T)


def pair_sgn_moment(s: float, t: float) -> float:
    """E[sgn f(s) sgn f(t)] = (2/pi) arcsin c(s, t)."""
    return 2 / math.pi * float(np.arcsin(min(float(kernels.c(s, t)), 1.0)))


def wick_product_moment(cov) -> float:
    """E[Y_1 ... Y_m] for a centred Gaussian vector with covariance ``cov``."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape[0] % 2:
        return 0.0
    return hafnian(cov)


def product_moment(points) -> float:
    """E[f(t_1) ... f(t_m)] = hf(Sigma(t))."""
    return wick_product_moment(kernels.covariance_matrix(points))


def complex_abs2_moment(points) -> float:
    """E|f(z_1) ... f(z_n)|^2 = hf(Mhat) over (z, conj z)."""
    mhat = kernels.assemble_complex(points, "Mhat")
    return _check_complex_real(complex(hafnian(mhat)), "complex_abs2_moment")
