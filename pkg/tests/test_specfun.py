import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from g2u_latency.errors import ContourFailure, NonConvergence
from g2u_latency.specfun import (
    AVG_SNR_SPEC, EXP_CDF_SPEC, LN1P_SPEC, MeijerGSpec, bessel_i0, bessel_i0e, contour_abscissa,
    integrate_semi_infinite, ln1p_direct, meijer_g, meijer_g_ln1p, meijer_g_mellin_barnes,
)

from oracles import i0_series

LOG_GRID = np.logspace(-6, 3, 19)


@pytest.mark.parametrize("x", [0.0, 1e-3, 0.5, 1.0, 5.0, 10.0, 30.0, 80.0, 200.0])
def test_i0_against_power_series(x):
    assert bessel_i0(x) == pytest.approx(i0_series(x), rel=1e-12)


def test_i0_scaled_matches_and_is_finite_at_large_argument():
    assert bessel_i0e(1e5) == pytest.approx(1 / math.sqrt(2 * math.pi * 1e5), rel=1e-5)
    assert bessel_i0(800.0) == math.inf
    with pytest.raises(ValueError):
        bessel_i0(-1.0)


def test_i0_array_input():
    out = bessel_i0(np.array([0.0, 1.0]))
    assert out.shape == (2,) and out[0] == 1.0


@pytest.mark.parametrize("z", LOG_GRID)
def test_ln1p_identity(z):
    assert meijer_g_ln1p(z) == pytest.approx(math.log1p(z), rel=1e-12)
    assert ln1p_direct(z) == pytest.approx(math.log1p(z), rel=1e-10)


@pytest.mark.parametrize("z", LOG_GRID[::2])
def test_mellin_barnes_ln1p(z):
    r = meijer_g_mellin_barnes(LN1P_SPEC, z)
    assert r.value == pytest.approx(math.log1p(z), rel=1e-9)
    assert r.error < 1e-6 * max(1.0, abs(r.value))


@pytest.mark.parametrize("z", [1e-4, 0.1, 1.0, 7.5, 40.0])
def test_mellin_barnes_exp_cdf(z):
    assert meijer_g_mellin_barnes(EXP_CDF_SPEC, z).value == pytest.approx(-math.expm1(-z), rel=1e-9)


@pytest.mark.parametrize("z", [0.3, 2.0, 10.0])
def test_mellin_barnes_agrees_with_general_evaluator(z):
    assert meijer_g_mellin_barnes(LN1P_SPEC, z).value == pytest.approx(meijer_g(LN1P_SPEC, z), rel=1e-9)


def test_contour_sits_between_pole_families():
    # Gamma(1 - s) poles at s = 1, 2, ...; Gamma(s) poles at s = 0, -1, ...
    assert contour_abscissa(LN1P_SPEC) == 0.5


def test_overlapping_poles_fail():
    # Gamma(1 - s) poles start at s = 1 while Gamma(-2 + s) poles reach up to s = 2
    bad = MeijerGSpec(1, 1, (3.0,), (1.0, 0.0))
    with pytest.raises(ContourFailure):
        contour_abscissa(bad)


def test_divergent_line_integral_reports_nonconvergence():
    # decay index <= 0: the integrand does not decay along the vertical line
    with pytest.raises((NonConvergence, ContourFailure)):
        meijer_g_mellin_barnes(AVG_SNR_SPEC, 3.0)


def test_mellin_barnes_requires_positive_argument():
    with pytest.raises(ValueError):
        meijer_g_mellin_barnes(LN1P_SPEC, 0.0)


@pytest.mark.parametrize("f, exact", [
    (lambda x: math.exp(-x), 1.0),
    (lambda x: x * math.exp(-x * x / 2), 1.0),
    (lambda x: x**3 * math.exp(-x), 6.0),
    (lambda x: math.exp(-((x - 40.0) ** 2) / 2), math.sqrt(2 * math.pi) * special.ndtr(40.0)),
])
def test_semi_infinite_quadrature(f, exact):
    r = integrate_semi_infinite(f)
    assert r.value == pytest.approx(exact, rel=1e-9)


def test_semi_infinite_quadrature_subdivision_cap():
    with pytest.raises(NonConvergence):
        integrate_semi_infinite(lambda x: math.sin(50 * x) ** 2 * math.exp(-x / 50), max_subdivisions=3)


@given(st.floats(1e-6, 1e3))
def test_ln1p_matches_mellin_barnes_property(z):
    assert meijer_g_mellin_barnes(LN1P_SPEC, z).value == pytest.approx(math.log1p(z), rel=1e-8)
