import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfzeros import correlations as cor
from pfzeros.errors import DuplicatePoints, PointOnRealAxis

interior = st.floats(-0.98, 0.98)


def test_rho1_spot_values():
    assert cor.rho_real([0.0]) == pytest.approx(1 / math.pi, rel=1e-14)
    assert cor.rho_real([0.5]) == pytest.approx(0.4244132, abs=5e-8)
    assert cor.rho_real([0.5]) == pytest.approx(cor.rho1_closed(0.5), rel=1e-14)


def test_rho2_linear_repulsion():
    # rho2(s, s + d) ~ d / (2 pi (1 - s^2)^3) for small d
    for s in (0.0, 0.4):
        d = 1e-3
        expected = d / (2 * math.pi * (1 - s * s) ** 3)
        assert cor.rho_real([s, s + d]) == pytest.approx(expected, rel=5 * d)


def test_coincident_points():
    with pytest.raises(DuplicatePoints):
        cor.rho_real([0.1, 0.1])
    assert cor.rho_real([0.1, 0.1, 0.4], allow_coincident=True) == 0.0


def test_rho2_routes_agree():
    rng = np.random.default_rng(0)
    for s, t in rng.uniform(-0.95, 0.95, size=(50, 2)):
        pf = cor.rho_real([s, t])
        assert cor.rho2_closed(s, t) == pytest.approx(pf, rel=1e-12, abs=1e-15)
        assert cor.rho_real([s, t], kind="Kprime") == pytest.approx(pf, rel=1e-10)
        assert pf / (cor.rho1_closed(s) * cor.rho1_closed(t)) == pytest.approx(cor.R(s, t), rel=1e-10)


def test_R_boundary_values():
    assert cor.R(0.3, 0.3) == pytest.approx(0.0, abs=1e-12)
    assert cor.R(0.0, 0.9999) > 0.99
    assert 0.0 < cor.R(0.0, 0.5) < 1.0


@pytest.mark.parametrize("pts", [(0.1, -0.3, 0.6), (-0.7, -0.2, 0.3, 0.8)])
def test_permutation_symmetry(pts):
    ref = cor.rho_real(pts)
    for perm in itertools.permutations(pts):
        assert cor.rho_real(perm) == pytest.approx(ref, rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(interior, interior)
def test_negative_correlation(s, t):
    assert cor.R(s, t) <= 1.0 + 1e-15


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.95, 0.9))
def test_R_increasing_to_the_right(s):
    t = np.linspace(s, 0.999, 1000)
    assert np.all(np.diff(cor.R(s, t)) >= -1e-14)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.95, 0.95), min_size=1, max_size=5, unique=True))
def test_rho_nonnegative(pts):
    if len(pts) > 1 and np.min(np.diff(np.sort(pts))) < 1e-6:
        return
    assert cor.rho_real(pts) >= 0.0


def test_complex_rho1():
    z = 0.5j
    expected = 1 / (math.pi * 1.25 * 0.5625)
    assert cor.rho_complex([z]) == pytest.approx(expected, rel=1e-12)
    assert cor.rho1_complex_closed(z) == pytest.approx(expected, rel=1e-14)
    assert cor.rho_complex_gram([z]) == pytest.approx(expected, rel=1e-10)


def test_complex_rho2_routes():
    rng = np.random.default_rng(5)
    for _ in range(50):
        z, w = (complex(*rng.uniform([-0.7, 0.05], [0.7, 0.7])) for _ in range(2))
        pf = cor.rho_complex([z, w])
        assert cor.rho2_complex_closed(z, w) == pytest.approx(pf, rel=1e-10)
        assert cor.rho_complex_gram([z, w]) == pytest.approx(pf, rel=1e-9)
        assert pf < cor.rho1_complex_closed(z) * cor.rho1_complex_closed(w)


def test_complex_repulsion_example():
    z, w = 0.5j, 0.6j
    assert cor.rho_complex([z, w]) < cor.rho1_complex_closed(z) * cor.rho1_complex_closed(w)


def test_complex_rejects_axis():
    with pytest.raises(PointOnRealAxis):
        cor.rho_complex([0.2])


def test_mean_count():
    assert cor.mean_count(0.5) == pytest.approx(math.log(3) / math.pi, rel=1e-15)
    # leading term (2/pi) r with an r^3 correction
    assert cor.mean_count(0.01) == pytest.approx(0.0063662, abs=1e-6)
    assert cor.mean_count(0.01) - 0.02 / math.pi == pytest.approx(2e-6 / (3 * math.pi), rel=1e-3)
    assert cor.mean_count(0.9) == pytest.approx(math.log(19) / math.pi, rel=1e-15)


def test_count_stats_modes():
    closed = cor.count_stats(0.5)
    assert closed.mean == cor.mean_count(0.5)
    integ = cor.count_stats(0.9, "integrated")
    assert math.isfinite(integ.variance) and integ.variance > 0
    assert integ.mean == pytest.approx(cor.mean_count(0.9), abs=1e-8)
    assert abs(integ.variance - cor.variance_principal(0.9)) < 1.0
    with pytest.raises(ValueError):
        cor.count_stats(1.0)
    with pytest.raises(ValueError):
        cor.count_stats(0.5, "exact")


def test_integrated_variance_small_r():
    # Var = m - m^2 + iint rho2, and rho2 ~ |t - s| / (2 pi) near the origin
    r = 0.05
    m = cor.mean_count(r)
    expected = m - m * m + (2 * r) ** 3 / (6 * math.pi)
    assert cor.integrated_variance(r) == pytest.approx(expected, rel=1e-3)


def test_mean_between_matches_quadrature():
    from scipy import integrate

    val, _ = integrate.quad(cor.rho1_closed, -0.2, 0.7)
    assert cor.integrated_mean_between(-0.2, 0.7) == pytest.approx(val, rel=1e-12)
