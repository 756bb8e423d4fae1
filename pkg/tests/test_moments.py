import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfzeros import correlations, kernels, moments
from pfzeros.errors import DuplicatePoints
from pfzeros.pfaffian import pfaffian

distinct_points = st.lists(st.floats(-0.9, 0.9), min_size=2, max_size=4, unique=True).filter(
    lambda p: np.min(np.diff(np.sort(p))) > 1e-3
)


def test_abs_moment_single_points():
    assert moments.abs_moment([0.0]) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-15)
    # f(0.5) ~ N(0, 4/3)
    assert moments.abs_moment([0.5]) == pytest.approx(math.sqrt(8 / (3 * math.pi)), rel=1e-14)


def test_abs_moment_bivariate_oracle():
    # E|XY| = (2/pi) sx sy (sqrt(1 - r^2) + r arcsin r) for a correlated normal pair
    s, t = 0.0, 0.5
    sx, sy = math.sqrt(kernels.sigma(s, s)), math.sqrt(kernels.sigma(t, t))
    r = kernels.sigma(s, t) / (sx * sy)
    expected = 2 / math.pi * sx * sy * (math.sqrt(1 - r * r) + r * math.asin(r))
    assert moments.abs_moment([s, t]) == pytest.approx(expected, rel=1e-13)


def test_sgn_pair():
    assert moments.sgn_moment([0.0, 0.6]) == pytest.approx(2 / math.pi * math.asin(0.8), rel=1e-14)
    assert moments.sgn_moment([0.0, 0.6]) == pytest.approx(0.590334, abs=5e-7)
    assert moments.pair_sgn_moment(0.0, 0.6) == pytest.approx(moments.sgn_moment([0.6, 0.0]), rel=1e-14)


def test_sgn_odd_is_zero():
    assert moments.sgn_moment([0.0, 0.3, 0.6]) == 0.0
    assert moments.sgn_moment([0.2]) == 0.0


def test_sgn_four_is_pfaffian_of_pair_moments():
    t = (0.1, 0.2, 0.3, 0.4)
    pair = np.zeros((4, 4))
    for i, j in itertools.combinations(range(4), 2):
        pair[i, j] = moments.pair_sgn_moment(t[i], t[j])
        pair[j, i] = -pair[i, j]
    assert moments.sgn_moment(t) == pytest.approx(pfaffian(pair), rel=1e-12)


def test_sorted_specialisation():
    t = (-0.6, -0.1, 0.3, 0.8)
    assert moments.sgn_moment_sorted(t) == pytest.approx(moments.sgn_moment(t), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(distinct_points.filter(lambda p: len(p) % 2 == 0), st.randoms())
def test_sgn_permutation_invariant(pts, rnd):
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert moments.sgn_moment(shuffled) == pytest.approx(moments.sgn_moment(pts), rel=1e-10, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(distinct_points)
def test_moment_bounds(pts):
    assert abs(moments.sgn_moment(pts)) <= 1.0 + 1e-12
    assert moments.abs_moment(pts) > 0.0


@settings(max_examples=40, deadline=None)
@given(distinct_points)
def test_consistency_with_rho(pts):
    n = len(pts)
    via_moment = (2 * math.pi) ** (-n / 2) * math.sqrt(moments.covariance_det(pts)) * moments.abs_moment(pts)
    assert via_moment == pytest.approx(correlations.rho_real(pts), rel=1e-10, abs=1e-300)


def test_boundary_decoupling():
    assert abs(moments.sgn_moment([0.2, 1 - 1e-9])) < 1e-3
    assert abs(moments.sgn_moment([0.1, 0.4, 0.7, 1 - 1e-9])) < 1e-3


def test_wick():
    assert moments.product_moment([0.0, 0.5]) == pytest.approx(1.0)
    assert moments.wick_product_moment(np.ones((4, 4))) == 3.0
    assert moments.wick_product_moment(np.ones((3, 3))) == 0.0
    t = (0.1, 0.2, 0.3, 0.4)
    cov = kernels.covariance_matrix(t)
    expected = cov[0, 1] * cov[2, 3] + cov[0, 2] * cov[1, 3] + cov[0, 3] * cov[1, 2]
    assert moments.product_moment(t) == pytest.approx(expected, rel=1e-14)


def test_complex_abs2():
    assert moments.complex_abs2_moment([0.5j]) == pytest.approx(4 / 3, rel=1e-14)
    assert moments.complex_abs2_moment([1e-6j]) == pytest.approx(1.0, rel=1e-11)
    z = 0.3 + 0.4j
    assert moments.complex_abs2_moment([z]) == pytest.approx(1 / (1 - abs(z) ** 2), rel=1e-14)


def test_duplicates_rejected():
    with pytest.raises(DuplicatePoints):
        moments.abs_moment([0.3, 0.3])
    with pytest.raises(DuplicatePoints):
        moments.sgn_moment([0.3, 0.3])


def test_inversion_sign():
    assert moments.inversion_sign([1, 2, 3]) == 1
    assert moments.inversion_sign([2, 1, 3]) == -1
    assert moments.inversion_sign([3, 2, 1]) == -1
