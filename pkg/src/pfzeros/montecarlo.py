"""Monte Carlo oracle: sample truncated series, extract zeros, estimate statistics.

Reproducibility contract: sample ``i`` always comes from chunk ``i // CHUNK_SIZE``
and chunk ``c`` always draws from the stream ``RngSpec(seed, c)``.  Workers
only change which process evaluates a chunk, so every estimate is
bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from pfzeros import correlations, kernels, moments
from pfzeros.errors import (
    EigensolveFailure,
    InsufficientSamples,
    TruncationTooCoarse,
)

DEFAULT_SEED = 20120515
CHUNK_SIZE = 1000
N_BATCHES = 100
TRUNCATION_EPS = 1e-12
REAL_IMAG_TOL = 1e-8
NEWTON_STEPS = 3
GRID_POINTS = 10_000
COMPANION_MAX_DEGREE = 256


@dataclass(frozen=True)
class RngSpec:
    master_seed: int = DEFAULT_SEED
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream id must be non-negative")
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Polynomial sum_k coeffs[k] z^k standing in for the infinite series."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float)
        if a.ndim != 1 or len(a) < 2:
            raise ValueError("need at least two coefficients")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", a)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def derivative(self, z):
        return np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(self.coeffs))


@dataclass(frozen=True)
class EstimatorReport:
    quantity: str
    estimate: float
    std_error: float
    n_samples: int
    prediction: float
    details: dict = field(default_factory=dict)

    @property
    def z_score(self) -> float:
        if self.std_error > 0:
            return (self.estimate - self.prediction) / self.std_error
        return math.nan

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z_score"] = self.z_score
        return d


# --- truncation ------------------------------------------------------------------


def tail_variance(r: float, degree: int) -> float:
    """sum_{k > N} r^(2k): variance of the discarded tail at |z| = r."""
    return r ** (2 * (degree + 1)) / (1 - r * r)


def truncation_degree(r: float, eps: float = TRUNCATION_EPS) -> int:
    """Smallest N whose tail variance on |z| <= r is below ``eps``."""
    if not (0.0 <= r < 1.0):
        raise ValueError(f"radius must lie in [0, 1), got {r!r}")
    if r == 0.0:
        return 2
    # r^(2n) / (1 - r^2) <= eps, which bounds the tail sum past n as well
    n = math.ceil((math.log(eps) + math.log(1 - r * r)) / (2 * math.log(r)))
    return max(n, 2)


def check_truncation(r: float, degree: int, eps: float = TRUNCATION_EPS) -> None:
    need = truncation_degree(r, eps)
    if degree < need:
        raise TruncationTooCoarse(
            f"degree {degree} leaves tail variance {tail_variance(r, degree):.3g} at radius {r}; need degree >= {need}"
        )


# --- sampling -----------------------------------------------------------------


def sample_series(degree: int, rng: RngSpec) -> TruncatedSeries:
    if degree < 2:
        raise ValueError("degree must be at least 2")
    return TruncatedSeries(rng.generator().standard_normal(degree + 1))


def sample_coefficients(n: int, degree: int, rng: RngSpec) -> np.ndarray:
    return rng.generator().standard_normal((n, degree + 1))


# --- root extraction ------------------------------------------------------------


def _horner(coeffs: np.ndarray, z: np.ndarray):
    """Value and derivative of each row polynomial at each row of ``z``."""
    p = np.zeros_like(z) + coeffs[:, -1:]
    dp = np.zeros_like(z)
    for k in range(coeffs.shape[1] - 2, -1, -1):
        dp = dp * z + p
        p = p * z + coeffs[:, k:k + 1]
    return p, dp


def companion_roots(coeffs: np.ndarray, refine_radius: float = 1.0) -> np.ndarray:
    """Roots of each row polynomial (ascending coefficients), shape (B, N).

    Eigenvalues of the companion matrix, then Newton steps for the roots
    inside ``refine_radius``.  Rows must have a non-zero leading coefficient.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    b, m = coeffs.shape
    deg = m - 1
    lead = coeffs[:, -1]
    if np.any(lead == 0):
        raise EigensolveFailure("leading coefficient is zero")
    comp = np.zeros((b, deg, deg))
    if deg > 1:
        idx = np.arange(deg - 1)
        comp[:, idx + 1, idx] = 1.0
    comp[:, :, -1] = -coeffs[:, :-1] / lead[:, None]
    try:
        roots = np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    if not np.all(np.isfinite(roots)):
        raise EigensolveFailure("eigensolver returned non-finite roots")
    roots = roots.astype(complex)
    inside = np.abs(roots) < refine_radius
    with np.errstate(all="ignore"):
        for _ in range(NEWTON_STEPS):
            p, dp = _horner(coeffs.astype(complex), roots)
            step = p / dp
            ok = inside & np.isfinite(step) & (np.abs(step) < 1e-2)
            roots = np.where(ok, roots - step, roots)
    return roots


def _strip(coeffs: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(coeffs)
    if len(nz) == 0:
        raise ValueError("the zero polynomial has no isolated zeros")
    return coeffs[: nz[-1] + 1]


def _roots_of(p: TruncatedSeries, refine_radius: float) -> np.ndarray:
    a = _strip(p.coeffs)
    if len(a) == 1:
        return np.empty(0, dtype=complex)
    return companion_roots(a[None, :], refine_radius)[0]


def _polish_real(p: TruncatedSeries, t: float) -> float:
    for _ in range(2):
        d = p.derivative(t)
        if d == 0:
            break
        step = p(t) / d
        if not np.isfinite(step) or abs(step) > 1e-6:
            break
        t -= step
    return float(t) + 0.0  # no negative zero


def real_zeros(p: TruncatedSeries, r: float, method: str = "companion") -> list[float]:
    """Real zeros of ``p`` inside (-r, r), ascending.

    ``method="companion"`` classifies refined eigenvalues with
    |Im| < 1e-8 as real; ``method="grid"`` brackets sign changes on a
    10^4-point grid (uniform in artanh t) and bisects, independently of any
    eigensolver.
    """
    if not (0.0 < r < 1.0):
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    if method == "grid":
        return _real_zeros_grid(p, r)
    if method != "companion":
        raise ValueError(f"unknown method {method!r}")
    roots = _roots_of(p, 1.0)
    real = roots[np.abs(roots.imag) < REAL_IMAG_TOL].real
    real = real[np.abs(real) < r]
    return sorted(_polish_real(p, t) for t in real)


def grid_nodes(radii: Sequence[float], n_points: int = GRID_POINTS) -> np.ndarray:
    """Nodes uniform in artanh(t) over the largest radius, plus every +-r exactly."""
    radii = [float(x) for x in radii]
    a = math.atanh(max(radii))
    t = np.tanh(np.linspace(-a, a, n_points))
    return np.unique(np.concatenate([t, radii, [-x for x in radii]]))


def _real_zeros_grid(p: TruncatedSeries, r: float) -> list[float]:
    t = grid_nodes([r])
    v = p(t)
    out = []
    for i in np.flatnonzero(np.signbit(v[1:]) != np.signbit(v[:-1])):
        lo, hi = t[i], t[i + 1]
        if v[i] == 0:
            root = lo
        else:
            root = brentq(p, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if -r < root < r:
            out.append(float(root))
    if len(t) and v[-1] == 0 and -r < t[-1] < r:
        out.append(float(t[-1]))
    return sorted(set(out))


def complex_zeros(p: TruncatedSeries, rmax: float) -> list[complex]:
    """Zeros with |z| < rmax and Im z > 0 (one per conjugate pair)."""
    if not (0.0 < rmax < 1.0):
        raise ValueError(f"rmax must lie in (0, 1), got {rmax!r}")
    roots = _roots_of(p, 1.0)
    sel = roots[(roots.imag >= REAL_IMAG_TOL) & (np.abs(roots) < rmax)]
    return sorted((complex(z) for z in sel), key=lambda z: (z.real, z.imag))


# --- per-chunk tasks --------------------------------------------------------------


class _SeriesTask:
    degree: int

    def draw(self, gen: np.random.Generator, m: int) -> np.ndarray:
        return gen.standard_normal((m, self.degree + 1))


@dataclass(frozen=True)
class _RealBinCounts(_SeriesTask):
    degree: int
    edges: tuple[tuple[float, float], ...]

    def run(self, coeffs):
        roots = companion_roots(coeffs)
        real = np.where(np.abs(roots.imag) < REAL_IMAG_TOL, roots.real, np.nan)
        return np.stack([np.sum((real >= a) & (real < b), axis=1) for a, b in self.edges], axis=1)


@dataclass(frozen=True)
class _RealCounts(_SeriesTask):
    degree: int
    radii: tuple[float, ...]
    method: str

    def run(self, coeffs):
        if self.method == "companion":
            roots = companion_roots(coeffs)
            real = np.where(np.abs(roots.imag) < REAL_IMAG_TOL, np.abs(roots.real), np.inf)
            return np.stack([np.sum(real <= r, axis=1) for r in self.radii], axis=1)
        t = grid_nodes(self.radii)
        powers = t[:, None] ** np.arange(self.degree + 1)
        sign = np.signbit(coeffs @ powers.T)
        change = sign[:, 1:] != sign[:, :-1]
        cols = []
        for r in self.radii:
            cell = (t[:-1] >= -r) & (t[1:] <= r)
            cols.append(change[:, cell].sum(axis=1))
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class _ComplexCellCounts(_SeriesTask):
    degree: int
    cell: tuple[float, float, float, float]

    def run(self, coeffs):
        x0, x1, y0, y1 = self.cell
        roots = companion_roots(coeffs)
        hit = (roots.real >= x0) & (roots.real < x1) & (roots.imag >= y0) & (roots.imag < y1)
        hit &= roots.imag >= REAL_IMAG_TOL
        return hit.sum(axis=1)[:, None]


@dataclass(frozen=True)
class _ComplexAbs2(_SeriesTask):
    degree: int
    points: tuple[complex, ...]

    def run(self, coeffs):
        z = np.array(self.points)
        powers = z[:, None] ** np.arange(self.degree + 1)
        vals = coeffs @ powers.T
        return (np.abs(np.prod(vals, axis=1)) ** 2)[:, None]


@dataclass(frozen=True)
class _GaussianMoment:
    points: tuple[float, ...]
    kind: str

    def draw(self, gen, m):
        return gen.standard_normal((m, len(self.points)))

    def run(self, normals):
        chol = moments.covariance_cholesky(self.points)
        x = normals @ chol.T
        if self.kind == "abs":
            out = np.abs(np.prod(x, axis=1))
        elif self.kind == "sgn":
            out = np.prod(np.sign(x), axis=1)
        else:
            out = np.prod(x, axis=1)
        return out[:, None]


def _run_chunk(args):
    task, seed, chunk, m = args
    gen = RngSpec(seed, chunk).generator()
    return np.asarray(task.run(task.draw(gen, m)), dtype=float)


def per_sample_values(task, n_samples: int, seed: int = DEFAULT_SEED, workers: int = 1) -> np.ndarray:
    """Stack of per-sample statistics, shape (n_samples, k), independent of ``workers``."""
    if n_samples <= 0:
        raise InsufficientSamples("no samples requested")
    jobs = []
    for chunk, start in enumerate(range(0, n_samples, CHUNK_SIZE)):
        jobs.append((task, seed, chunk, min(CHUNK_SIZE, n_samples - start)))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    return np.concatenate(parts, axis=0)


# --- error bars -----------------------------------------------------------------


def _batches(n: int) -> list[np.ndarray]:
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {n}")
    return np.array_split(np.arange(n), min(N_BATCHES, n))


def batch_mean(values: np.ndarray) -> tuple[float, float]:
    """Mean and its batch-means standard error."""
    values = np.asarray(values, dtype=float)
    means = np.array([values[idx].mean() for idx in _batches(len(values))])
    return float(values.mean()), float(means.std(ddof=1) / math.sqrt(len(means)))


def jackknife(values: np.ndarray, statistic) -> tuple[float, float]:
    """Statistic on all samples and its delete-one-batch jackknife error."""
    values = np.asarray(values, dtype=float)
    full = statistic(values)
    groups = _batches(len(values))
    mask = np.ones(len(values), dtype=bool)
    loo = []
    for idx in groups:
        mask[idx] = False
        loo.append(statistic(values[mask]))
        mask[idx] = True
    loo = np.asarray(loo)
    g = len(groups)
    se = math.sqrt((g - 1) / g * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    return full, float(se)


# --- estimators -------------------------------------------------------------------


def _series_degree(degree: int | None, radius: float) -> int:
    if degree is None:
        return truncation_degree(radius)
    if degree < 2:
        raise ValueError("degree must be at least 2")
    check_truncation(radius, degree)
    return degree


def _check_bins(bins) -> tuple[tuple[float, float], ...]:
    out = []
    for a, b in bins:
        a, b = float(a), float(b)
        if not (-1 < a < b < 1):
            raise ValueError(f"bin [{a}, {b}) must satisfy -1 < a < b < 1")
        out.append((a, b))
    srt = sorted(out)
    for (a0, b0), (a1, b1) in zip(srt, srt[1:]):
        if a1 < b0:
            raise ValueError("bins must be disjoint")
    return tuple(out)


def estimate_rho1(
    bins,
    degree: int | None = None,
    samples: int = 200_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> list[EstimatorReport]:
    """Real-zero density per bin: mean count / bin width vs rho1 at the bin centre."""
    edges = _check_bins(bins)
    radius = max(max(abs(a), abs(b)) for a, b in edges)
    deg = _series_degree(degree, radius)
    counts = per_sample_values(_RealBinCounts(deg, edges), samples, seed, workers)
    reports = []
    for j, (a, b) in enumerate(edges):
        width = b - a
        est, se = batch_mean(counts[:, j] / width)
        reports.append(
            EstimatorReport(
                "rho1",
                est,
                se,
                samples,
                float(correlations.rho1_closed((a + b) / 2)),
                {"bin": [a, b], "degree": deg, "bin_average": correlations.integrated_mean_between(a, b) / width},
            )
        )
    return reports


def estimate_rho2(
    bin1,
    bin2,
    degree: int | None = None,
    samples: int = 200_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> EstimatorReport:
    """Ordered pairs of distinct zeros in bin1 x bin2 per unit area per draw."""
    edges = _check_bins([bin1]) + _check_bins([bin2])
    (a1, b1), (a2, b2) = edges
    radius = max(abs(a1), abs(b1), abs(a2), abs(b2))
    deg = _series_degree(degree, radius)
    lo, hi = max(a1, a2), min(b1, b2)
    cells = edges + (((lo, hi),) if lo < hi else ())
    counts = per_sample_values(_RealBinCounts(deg, cells), samples, seed, workers)
    pairs = counts[:, 0] * counts[:, 1]
    if lo < hi:
        pairs = pairs - counts[:, 2]
    est, se = batch_mean(pairs / ((b1 - a1) * (b2 - a2)))
    s, t = (a1 + b1) / 2, (a2 + b2) / 2
    pred = correlations.rho2_closed(s, t)
    return EstimatorReport(
        "rho2",
        est,
        se,
        samples,
        pred,
        {"bins": [[a1, b1], [a2, b2]], "degree": deg, "uncorrelated": float(correlations.rho1_closed(s) * correlations.rho1_closed(t))},
    )


def estimate_rho1_complex(
    cell,
    degree: int | None = None,
    samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> EstimatorReport:
    """Complex-zero density in the rectangle ``(x0, x1, y0, y1)`` of the upper half-disc."""
    x0, x1, y0, y1 = (float(v) for v in cell)
    if not (x0 < x1 and 0 <= y0 < y1):
        raise ValueError("cell must satisfy x0 < x1 and 0 <= y0 < y1")
    radius = max(abs(complex(x, y)) for x in (x0, x1) for y in (y0, y1))
    if radius >= 1:
        raise ValueError("cell must lie inside the unit disc")
    deg = _series_degree(degree, radius)
    counts = per_sample_values(_ComplexCellCounts(deg, (x0, x1, y0, y1)), samples, seed, workers)
    area = (x1 - x0) * (y1 - y0)
    est, se = batch_mean(counts[:, 0] / area)
    centre = complex((x0 + x1) / 2, (y0 + y1) / 2)
    info = {"cell": [x0, x1, y0, y1], "degree": deg, "cell_average": _cell_average(x0, x1, y0, y1)}
    return EstimatorReport("rho1_complex", est, se, samples, correlations.rho1_complex_closed(centre), info)


def _cell_average(x0, x1, y0, y1) -> float:
    if y0 == 0.0:
        return math.nan  # the density is not defined on the real axis
    val, _ = integrate.dblquad(
        lambda y, x: correlations.rho1_complex_closed(complex(x, y)), x0, x1, y0, y1, epsabs=1e-12, epsrel=1e-10
    )
    return val / ((x1 - x0) * (y1 - y0))


def _count_method(method: str, degree: int) -> str:
    if method == "auto":
        return "companion" if degree <= COMPANION_MAX_DEGREE else "grid"
    if method not in ("companion", "grid"):
        raise ValueError(f"unknown method {method!r}")
    return method


def estimate_count_stats(
    r: float,
    degree: int | None = None,
    samples: int = 200_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    method: str = "auto",
) -> tuple[EstimatorReport, EstimatorReport]:
    """Mean and variance of the number of real zeros in [-r, r].

    The mean is compared with the closed form; the variance with the
    quadrature value, since the closed variance is only known up to O(1).
    """
    if not (0.0 < r < 1.0):
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    deg = _series_degree(degree, r)
    meth = _count_method(method, deg)
    counts = per_sample_values(_RealCounts(deg, (r,), meth), samples, seed, workers)[:, 0]
    info = {"r": r, "degree": deg, "method": meth}
    m, m_se = batch_mean(counts)
    v, v_se = jackknife(counts, lambda x: x.var(ddof=1))
    return (
        EstimatorReport("mean_count", m, m_se, samples, correlations.mean_count(r), info),
        EstimatorReport("var_count", v, v_se, samples, correlations.integrated_variance(r), info),
    )


def estimate_variance_slope(
    radii: Sequence[float] = (0.9, 0.95, 0.99),
    degree: int | None = None,
    samples: int = 50_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    method: str = "auto",
) -> EstimatorReport:
    """Least-squares slope of Var N_r against E N_r across ``radii``.

    One set of draws serves every radius (nested intervals), with the degree
    set by the largest radius.
    """
    radii = tuple(sorted(float(r) for r in radii))
    if len(radii) < 2 or not all(0 < r < 1 for r in radii):
        raise ValueError("need at least two radii in (0, 1)")
    deg = _series_degree(degree, radii[-1])
    meth = _count_method(method, deg)
    counts = per_sample_values(_RealCounts(deg, radii, meth), samples, seed, workers)

    def slope(x):
        return np.polyfit(x.mean(axis=0), x.var(axis=0, ddof=1), 1)[0]

    est, se = jackknife(counts, slope)
    details = {
        "radii": list(radii),
        "degree": deg,
        "method": meth,
        "means": counts.mean(axis=0).tolist(),
        "variances": counts.var(axis=0, ddof=1).tolist(),
    }
    return EstimatorReport("variance_slope", float(est), se, samples, correlations.VARIANCE_SLOPE, details)


def estimate_gaussian_moments(
    points,
    kind: str,
    samples: int = 1_000_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> EstimatorReport:
    """Moments of (f(t_1), ..., f(t_n)) from exact-law Cholesky draws."""
    cfg = kernels.real_config(points)
    closed = {"abs": moments.abs_moment, "sgn": moments.sgn_moment, "product": moments.product_moment}
    if kind not in closed:
        raise ValueError(f"unknown moment kind {kind!r}; expected one of {sorted(closed)}")
    moments.covariance_cholesky(cfg.points)
    vals = per_sample_values(_GaussianMoment(cfg.points, kind), samples, seed, workers)[:, 0]
    est, se = batch_mean(vals)
    return EstimatorReport(f"{kind}_moment", est, se, samples, float(closed[kind](cfg)), {"points": list(cfg.points)})


def estimate_complex_abs2_moment(
    points,
    degree: int | None = None,
    samples: int = 200_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> EstimatorReport:
    """E|f(z_1) ... f(z_n)|^2 from truncated-series draws."""
    cfg = kernels.complex_config(points)
    deg = _series_degree(degree, max(abs(z) for z in cfg.points))
    vals = per_sample_values(_ComplexAbs2(deg, cfg.points), samples, seed, workers)[:, 0]
    est, se = batch_mean(vals)
    return EstimatorReport(
        "complex_abs2_moment",
        est,
        se,
        samples,
        moments.complex_abs2_moment(cfg),
        {"points": [[z.real, z.imag] for z in cfg.points], "degree": deg},
    )
