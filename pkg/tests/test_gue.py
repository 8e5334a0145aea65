import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from qwalk.gue import (
    gauss_gn,
    gauss_gn_contour,
    gauss_gn_hermite,
    gauss_gn_negative,
    gue1_density,
    gue2_box_prob,
    gue2_density,
    gue2_marginal_cdf,
    gue2_marginal_density,
    gue_orthant_prob,
    integrate_density_n2,
    mean_smallest_n2,
    sample_gue,
    sample_gue_corners,
    smallest_eigenvalue_2x2_cdf,
)
from qwalk.harness import ks_test

# E[lambda_min] of a 2x2 GUE matrix: minus the mean of chi_3 / sqrt 2, i.e. -2/sqrt(pi)
MEAN_Y1_N2 = -1.1283791670955126

Z = np.linspace(-4, 4, 17)


def test_g0_and_g1():
    assert np.allclose(gauss_gn(0, Z), stats.norm.pdf(Z), atol=1e-15)
    assert np.allclose(gauss_gn(1, Z), -Z * stats.norm.pdf(Z), atol=1e-15)
    # G_2 = (z^2 - 1) phi
    assert np.allclose(gauss_gn(2, Z), (Z * Z - 1) * stats.norm.pdf(Z), atol=1e-14)


@pytest.mark.parametrize("n", [-4, -3, -2, -1, 0, 1, 2, 3])
def test_derivative_relation(n):
    # d/dz G_n = G_{n+1}
    h = 1e-5
    z = np.linspace(-3, 3, 13)
    fd = (gauss_gn(n, z + h) - gauss_gn(n, z - h)) / (2 * h)
    assert np.allclose(fd, gauss_gn(n + 1, z), atol=1e-8)


@pytest.mark.parametrize("n", [-5, -3, -1, 0, 2, 5, 8])
def test_contour_agrees(n):
    ref = gauss_gn_hermite(n, Z) if n >= 0 else gauss_gn_negative(n, Z, exact=True)
    assert np.allclose(gauss_gn_contour(n, Z), ref, atol=1e-10)


@pytest.mark.parametrize("n", [-1, -2, -3, -4])
def test_negative_closed_forms(n):
    z = np.linspace(-6, 6, 25)
    assert np.allclose(gauss_gn_negative(n, z), gauss_gn_negative(n, z, exact=True), atol=1e-14, rtol=1e-12)


def test_g_minus_one_is_shifted_cdf():
    assert np.allclose(gauss_gn(-1, Z), stats.norm.cdf(Z) - 1, atol=1e-15)


def test_errors():
    with pytest.raises(ValueError):
        gue1_density([1.0, 0.0])
    with pytest.raises(ValueError):
        gauss_gn_hermite(-1, 0.0)
    with pytest.raises(ValueError):
        sample_gue_corners(0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        gue_orthant_prob([0, 0, 0, 0])


def test_samples_are_hermitian_with_right_scale():
    h = sample_gue(3, np.random.default_rng(1), 40_000)
    assert np.allclose(h, np.conj(np.transpose(h, (0, 2, 1))))
    assert np.var(h[:, 0, 0].real) == pytest.approx(1.0, abs=0.03)
    assert np.var(h[:, 0, 1].real) == pytest.approx(0.5, abs=0.02)
    assert np.var(h[:, 0, 1].imag) == pytest.approx(0.5, abs=0.02)


def test_corner_minima_decrease():
    y = sample_gue_corners(4, np.random.default_rng(2), 2000)
    # lambda_1 of a larger corner is never above that of a smaller one
    assert np.all(np.diff(y, axis=1) >= -1e-12)


def test_n1_is_standard_normal():
    y = sample_gue_corners(1, np.random.default_rng(3), 20_000)[:, 0]
    assert ks_test(y, stats.norm.cdf, 0.01).passed


def test_density_closed_form_and_mass():
    for y1, y2 in [(-1.0, 0.5), (0.0, 0.0), (-2.0, 1.5), (0.3, 2.0)]:
        assert gue1_density([y1, y2]) == pytest.approx(float(gue2_density(y1, y2)), abs=1e-15)
    assert integrate_density_n2() == pytest.approx(1.0, abs=1e-8)
    assert gue2_box_prob(-np.inf, np.inf, -np.inf, np.inf) == pytest.approx(1.0, abs=1e-10)


def test_mean_smallest():
    assert mean_smallest_n2() == pytest.approx(MEAN_Y1_N2, abs=1e-10)
    y = sample_gue_corners(2, np.random.default_rng(4), 100_000)[:, 0]
    assert abs(y.mean() - MEAN_Y1_N2) < 3 * y.std() / math.sqrt(y.size)


def test_marginal_against_chi_oracle():
    ys = np.linspace(-4, 2, 13)
    assert np.allclose(gue2_marginal_cdf(1, ys), smallest_eigenvalue_2x2_cdf(ys), atol=1e-12)
    h = 1e-5
    fd = (gue2_marginal_cdf(1, ys + h) - gue2_marginal_cdf(1, ys - h)) / (2 * h)
    assert np.allclose(fd, gue2_marginal_density(ys), atol=1e-8)
    assert gue2_marginal_cdf(1, np.inf) == 1.0


def test_marginal_ks():
    y = sample_gue_corners(2, np.random.default_rng(5), 50_000)
    assert ks_test(y[:, 0], lambda v: gue2_marginal_cdf(1, v), 0.01).passed
    assert ks_test(y[:, 1], stats.norm.cdf, 0.01).passed


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_orthant_n2_monotone_and_bounded(a, b):
    p = gue_orthant_prob([a, b])
    assert -1e-12 <= p <= 1 + 1e-12
    assert gue_orthant_prob([a + 0.5, b]) >= p - 1e-12


def test_orthant_n3_total_mass_and_marginal():
    assert gue_orthant_prob([9, 9, 9]) == pytest.approx(1.0, abs=1e-10)
    # the last coordinate alone is standard normal
    for c in (-1.0, 0.0, 0.7):
        assert gue_orthant_prob([9, 9, c]) == pytest.approx(stats.norm.cdf(c), abs=1e-10)


def test_orthant_n3_against_samples():
    y = sample_gue_corners(3, np.random.default_rng(6), 60_000)
    grid = [-2.5, -1.5, -0.5, 0.5]
    worst = 0.0
    for a in grid:
        for b in grid:
            for c in grid:
                emp = np.mean((y[:, 0] <= a) & (y[:, 1] <= b) & (y[:, 2] <= c))
                p = gue_orthant_prob([a, b, c])
                se = math.sqrt(max(p * (1 - p), 1e-6) / y.shape[0])
                worst = max(worst, abs(emp - p) / se)
    assert worst < 4.5


def test_n3_smallest_marginal_ks():
    tab = np.linspace(-7, 3, 201)
    cdf_tab = np.array([gue_orthant_prob([a, 9, 9]) for a in tab])
    y = sample_gue_corners(3, np.random.default_rng(7), 30_000)[:, 0]
    assert ks_test(y, lambda v: np.interp(v, tab, cdf_tab), 0.01).passed
