"""Deterministic identity suites.

Each suite draws random instances from a seeded generator, compares two
independent evaluations of the same quantity and reports the worst error.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import mpmath
import numpy as np

from pfzeros import correlations, kernels, moments
from pfzeros.pfaffian import determinant, hafnian, pfaffian, pfaffian_combinatorial

DEFAULT_TRIALS = 100
IDENTITY_TOL = 1e-8
KERNEL_EQUIV_TOL = 1e-10
DERIVATIVE_TOL = 1e-6
DERIVATIVE_STEP = 1e-5
LADDER_TOL = 1e-5
LADDER_STEP = 1e-5
CONDITIONAL_TOL = 1e-12
COMPLEX_CONDITIONAL_TOL = 1e-10


@dataclass
class Check:
    name: str
    trials: int
    max_error: float
    tolerance: float
    error_kind: str = "relative"

    @property
    def passed(self) -> bool:
        return bool(self.max_error < self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def rel_err(a, b) -> float:
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _spread_points(rng: np.random.Generator, n: int, bound: float = 0.9, gap: float = 0.02) -> np.ndarray:
    """n points uniform in (-bound, bound), redrawn until pairwise gaps exceed ``gap``."""
    while True:
        x = rng.uniform(-bound, bound, n)
        if n < 2 or np.min(np.diff(np.sort(x))) > gap:
            return x


def hyperbolic_points(rng: np.random.Generator, n: int, half_width: float = 3.0, gap: float = 0.25) -> np.ndarray:
    """tanh(u) for u uniform on [-half_width, half_width] with pairwise |du| > gap.

    Cauchy-type matrices on points crowded in Euclidean terms have condition
    numbers beyond 1e12 at order 12, so identities on them cannot be checked
    to 1e-8 in double precision; spacing in artanh(x) keeps them well posed.
    """
    while True:
        u = rng.uniform(-half_width, half_width, n)
        if n < 2 or np.min(np.diff(np.sort(u))) > gap:
            return np.tanh(u)


def upper_half_points(
    rng: np.random.Generator, n: int, rmax: float = 0.9, min_imag: float = 0.05, separation: float = 0.2
) -> np.ndarray:
    """Points in the upper half-disc with pairwise |mu(z, w)| > separation."""
    out: list[complex] = []
    while len(out) < n:
        z = complex(rng.uniform(-rmax, rmax), rng.uniform(min_imag, rmax))
        if abs(z) < rmax and all(abs(kernels.mu(z, w)) > separation for w in out):
            out.append(z)
    return np.array(out)


def _random_skew(rng: np.random.Generator, order: int) -> np.ndarray:
    a = rng.standard_normal((order, order))
    return a - a.T


def _run(name: str, trials: int, tol: float, fn: Callable[[np.random.Generator, int], float], rng, kind="relative"):
    worst = 0.0
    for i in range(trials):
        worst = max(worst, float(fn(rng, i)))
    return Check(name, trials, worst, tol, kind)


# --- identities -----------------------------------------------------------------------


def _cauchy(rng, i):
    n = 1 + i % 6
    if i % 2:
        x, y = upper_half_points(rng, n), upper_half_points(rng, n)
    else:
        x, y = hyperbolic_points(rng, n), hyperbolic_points(rng, n)
    return rel_err(determinant(kernels.cauchy_matrix(x, y)), kernels.cauchy_product(x, y))


def _q_product(rng, i):
    n = 1 + i % 6
    x = hyperbolic_points(rng, n)
    return rel_err(kernels.q_products(x), (-1) ** (n * (n - 1) // 2) * determinant(kernels.cauchy_matrix(x)))


def _schur(rng, i):
    x = hyperbolic_points(rng, 2 * (1 + i % 6))
    return rel_err(pfaffian(kernels.schur_matrix(x)), kernels.mu_product(x))


def _pf_hf(rng, i):
    x = hyperbolic_points(rng, 2 * (1 + i % 6))
    lhs = kernels.mu_product(x) * hafnian(kernels.cauchy_matrix(x))
    return rel_err(lhs, pfaffian(kernels.pfaffian_hafnian_matrix(x)))


def _pf_squared(rng, i):
    m = _random_skew(rng, 2 * (1 + i % 6))
    return rel_err(pfaffian(m) ** 2, determinant(m))


def _pf_congruence(rng, i):
    order = 2 * (1 + i % 6)
    b = _random_skew(rng, order)
    a = rng.standard_normal((order, order))
    return rel_err(pfaffian(a @ b @ a.T), determinant(a) * pfaffian(b))


def _pf_routes(rng, i):
    m = _random_skew(rng, 2 * (1 + i % 5))
    return rel_err(pfaffian_combinatorial(m), pfaffian(m))


def _real_conditional(rng, i):
    x, y, t = rng.uniform(-0.99, 0.99, 3)
    lhs = kernels.conditional_covariance(x, y, t)
    rhs = kernels.mu(x, t) * kernels.mu(y, t) * kernels.sigma(x, y)
    return abs(lhs - rhs) / max(1.0, abs(kernels.sigma(x, y)))


def _complex_conditional(rng, i):
    z, w, eta = upper_half_points(rng, 3)
    lhs = kernels.conditional_complex_gram(z, w, eta)
    rhs = kernels.complex_gram_block(z, w, kernels.zero_conditioned_scale(eta))
    return np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs)))


def identities(trials: int = DEFAULT_TRIALS, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    return [
        _run("cauchy_determinant", trials, IDENTITY_TOL, _cauchy, rng),
        _run("q_product_determinant", trials, IDENTITY_TOL, _q_product, rng),
        _run("schur_pfaffian", trials, IDENTITY_TOL, _schur, rng),
        _run("pfaffian_hafnian", trials, IDENTITY_TOL, _pf_hf, rng),
        _run("pfaffian_squared_det", trials, IDENTITY_TOL, _pf_squared, rng),
        _run("pfaffian_congruence", trials, IDENTITY_TOL, _pf_congruence, rng),
        _run("pfaffian_routes_agree", trials, IDENTITY_TOL, _pf_routes, rng),
        _run("conditional_covariance", trials, IDENTITY_TOL, _real_conditional, rng, "scaled"),
        _run("complex_conditional_law", trials, IDENTITY_TOL, _complex_conditional, rng, "scaled"),
    ]


def conditional_law(trials: int = DEFAULT_TRIALS, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    grid = np.linspace(-0.99, 0.99, 10)
    x, y, t = np.meshgrid(grid, grid, grid, indexing="ij")
    lhs = kernels.conditional_covariance(x, y, t)
    rhs = kernels.mu(x, t) * kernels.mu(y, t) * kernels.sigma(x, y)
    grid_err = float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(kernels.sigma(x, y)))))
    return [
        Check("conditional_covariance_grid", grid.size**3, grid_err, CONDITIONAL_TOL, "scaled"),
        _run("conditional_covariance_random", trials, CONDITIONAL_TOL, _real_conditional, rng, "scaled"),
        _run("complex_conditional_law", trials, COMPLEX_CONDITIONAL_TOL, _complex_conditional, rng, "scaled"),
    ]


# --- kernel structure ----------------------------------------------------------------


def _k22_mp(s, t):
    s, t = mpmath.mpf(s), mpmath.mpf(t)
    cc = mpmath.sqrt((1 - s * s) * (1 - t * t)) / (1 - s * t)
    return mpmath.sign(t - s) * mpmath.asin(min(cc, mpmath.mpf(1)))


def derivatives(trials: int = DEFAULT_TRIALS, seed: int = 0, step: float = DERIVATIVE_STEP) -> list[Check]:
    """Central differences of K22 against K12, K21 and K11 at off-diagonal points.

    First differences run on the float64 K22.  The mixed second difference
    divides by step^2, so it is taken on a 40-digit evaluation of the same
    formula to keep rounding out of the comparison.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < trials:
        s, t = rng.uniform(-0.9, 0.9, 2)
        if abs(s - t) > 0.05:
            pairs.append((s, t))
    h = step
    e12 = e21 = e11 = e22 = 0.0
    with mpmath.workdps(40):
        hm = mpmath.mpf(h)
        for s, t in pairs:
            d_s = (kernels.k22(s + h, t) - kernels.k22(s - h, t)) / (2 * h)
            d_t = (kernels.k22(s, t + h) - kernels.k22(s, t - h)) / (2 * h)
            d_st = (
                _k22_mp(s + hm, t + hm) - _k22_mp(s + hm, t - hm) - _k22_mp(s - hm, t + hm) + _k22_mp(s - hm, t - hm)
            ) / (4 * hm * hm)
            e12 = max(e12, abs(d_s - kernels.k12(s, t)))
            e21 = max(e21, abs(d_t - kernels.k21(s, t)))
            e11 = max(e11, abs(float(d_st) - kernels.k11(s, t)))
            e22 = max(e22, abs(float(_k22_mp(s, t)) - kernels.k22(s, t)))
    return [
        Check("dK22_ds_is_K12", trials, float(e12), DERIVATIVE_TOL, "absolute"),
        Check("dK22_dt_is_K21", trials, float(e21), DERIVATIVE_TOL, "absolute"),
        Check("d2K22_dsdt_is_K11", trials, float(e11), DERIVATIVE_TOL, "absolute"),
        Check("K22_float_matches_extended", trials, float(e22), 1e-14, "absolute"),
    ]


def kernel_equivalence(trials: int = DEFAULT_TRIALS, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    entry_err = pf_err = rho_err = 0.0
    for i in range(trials):
        t = _spread_points(rng, 1 + i % 4, bound=0.95, gap=1e-3)
        k = kernels.assemble_real(t, "K")
        kp = kernels.assemble_real(t, "Kprime")
        q = kernels.q_conjugation(t)
        entry_err = max(entry_err, float(np.max(np.abs(q @ k @ q - kp) / np.maximum(1.0, np.abs(kp)))))
        pf_err = max(pf_err, rel_err(pfaffian(k), pfaffian(kp)))
        rho_err = max(rho_err, rel_err(correlations.rho_real(t, "K"), correlations.rho_real(t, "Kprime")))
    return [
        Check("q_conjugation_entrywise", trials, entry_err, 1e-12, "scaled"),
        Check("pfaffian_K_vs_Kprime", trials, pf_err, KERNEL_EQUIV_TOL),
        Check("rho_K_vs_Kprime", trials, rho_err, KERNEL_EQUIV_TOL),
    ]


def ladder(n: int = 2, trials: int = 10, seed: int = 0, step: float = LADDER_STEP) -> list[Check]:
    """d/dt_{k+1} pf L^[k] = pf L^[k+1] for every k on 2n points, by central differences."""
    rng = np.random.default_rng(seed)
    m = 2 * n
    worst = [0.0] * m
    for _ in range(trials):
        t = _spread_points(rng, m, bound=0.9, gap=0.05)
        for k in range(m):
            up, down = t.copy(), t.copy()
            up[k] += step
            down[k] -= step
            fd = (pfaffian(kernels.assemble_L_prefix(up, k)) - pfaffian(kernels.assemble_L_prefix(down, k))) / (2 * step)
            exact = pfaffian(kernels.assemble_L_prefix(t, k + 1))
            worst[k] = max(worst[k], abs(fd - exact))
    return [Check(f"ladder_k{k}", trials, worst[k], LADDER_TOL, "absolute") for k in range(m)]


def consistency(trials: int = DEFAULT_TRIALS, seed: int = 0) -> list[Check]:
    """rho_n = (2 pi)^(-n/2) det(Sigma)^(1/2) E|f(t_1)...f(t_n)|, n <= 4."""
    rng = np.random.default_rng(seed)

    def one(rng, i):
        t = _spread_points(rng, 1 + i % 4)
        n = len(t)
        rhs = (2 * math.pi) ** (-n / 2) * math.sqrt(moments.covariance_det(t)) * moments.abs_moment(t)
        return rel_err(correlations.rho_real(t), rhs)

    return [_run("rho_vs_abs_moment", trials, KERNEL_EQUIV_TOL, one, rng)]


SUITES = {
    "identities": identities,
    "derivatives": derivatives,
    "kernel-equivalence": kernel_equivalence,
    "ladder": ladder,
    "conditional-law": conditional_law,
    "consistency": consistency,
}
