import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from projevo.errors import ConvergenceError, DomainError
from projevo.specfun import (QuadratureSpec, adaptive_quad, band_integrals, panel_integral,
                             quadratic_phase_integral, sinc_sq_kernel, sine_integral)


def si_oracle(x):
    """Si by QUADPACK with a breakpoint at every multiple of pi."""
    if x == 0:
        return 0.0
    s = math.copysign(1.0, x)
    a = abs(x)
    edges = np.append(np.arange(0.0, a, math.pi), a)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            # asking for 1e-15 triggers a harmless round-off notice
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            v, _ = integrate.quad(lambda t: np.sinc(t / math.pi), lo, hi, epsabs=1e-15, epsrel=1e-14)
        total += v
    return s * total


def riemann_phase(k_lo, k_hi, x, c, n=1_000_000):
    h = (k_hi - k_lo) / n
    k = k_lo + h * (np.arange(n) + 0.5)
    return complex(h * np.sum(np.exp(1j * k * x - 1j * c * k * k)))


# -- sine integral -------------------------------------------------------------

def test_si_zero():
    assert sine_integral(0.0) == 0.0


def test_si_large_argument():
    assert abs(sine_integral(1e6) - math.pi / 2) < 1e-5


def test_si_one_matches_quadrature():
    assert abs(sine_integral(1.0) - si_oracle(1.0)) <= 1e-12


@pytest.mark.parametrize("x", [0.5, 3.9, 4.0, 4.1, 7.3, 20.0, 49.9, 1e3, 1e4])
def test_si_against_oracle_across_branch_switch(x):
    assert abs(sine_integral(x) - si_oracle(x)) <= 1e-12


def test_si_array_matches_scalar():
    xs = np.linspace(-30, 30, 61)
    arr = sine_integral(xs)
    assert arr.shape == xs.shape
    assert np.all(arr == np.array([sine_integral(float(x)) for x in xs]))


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_si_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        sine_integral(bad)


@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_si_odd(x):
    assert abs(sine_integral(x) + sine_integral(-x)) <= 1e-14


def test_si_increasing_on_zero_pi():
    xs = np.linspace(0, math.pi, 2001)
    assert np.all(np.diff(sine_integral(xs)) > 0)


# -- sinc^2 kernel ---------------------------------------------------------------

def test_sinc_sq_origin():
    assert sinc_sq_kernel(0.0, 0.7) == pytest.approx(0.49, abs=1e-16)


def test_sinc_sq_quarter_period():
    dk = 1.3
    assert sinc_sq_kernel(math.pi / (2 * dk), dk) == pytest.approx((2 * dk / math.pi) ** 2, rel=1e-14)


@given(st.floats(-10, 10).filter(lambda u: abs(u) > 1e-3), st.floats(1e-3, 2.0))
def test_sinc_sq_direct(u, dk):
    assert sinc_sq_kernel(u, dk) == pytest.approx(math.sin(u * dk) ** 2 / u ** 2, rel=1e-12)


def test_sinc_sq_continuous_at_origin():
    dk = 0.9
    us = np.array([-1e-7, -1e-9, 0.0, 1e-9, 1e-7])
    assert np.allclose(sinc_sq_kernel(us, dk), dk * dk, rtol=1e-12)


@pytest.mark.parametrize("dk", [0.0, -1.0])
def test_sinc_sq_rejects_dk(dk):
    with pytest.raises(DomainError):
        sinc_sq_kernel(1.0, dk)


# -- quadrature ------------------------------------------------------------------

def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=-1)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)


def test_adaptive_quad_constant():
    v, err = adaptive_quad(lambda t: 1.0, 0.0, 1.0)
    assert v == pytest.approx(1.0, abs=1e-14) and err >= 0


def test_adaptive_quad_sine():
    assert adaptive_quad(math.sin, 0.0, math.pi)[0] == pytest.approx(2.0, abs=1e-13)


def test_adaptive_quad_sinc_sq_against_fixed_grid():
    # high-resolution Simpson oracle on a fine grid
    x = np.linspace(-50, 50, 2_000_001)
    oracle = integrate.simpson(sinc_sq_kernel(x, 1.0), x=x)
    v, _ = adaptive_quad(lambda u: sinc_sq_kernel(u, 1.0), -50, 50,
                         points=list(np.arange(-50, 51) * math.pi / 1.0))
    assert v == pytest.approx(oracle, abs=1e-9)
    # coverage: int over R is pi*dk, tails beyond |u|=50 carry about 1/50
    assert math.pi - v == pytest.approx(2 * (1 / 100), abs=2e-3)


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(-5, 0), st.floats(0.1, 5))
def test_adaptive_quad_exact_for_cubics(c, a, w):
    b = a + w
    f = np.polynomial.Polynomial(c)
    exact = f.integ()(b) - f.integ()(a)
    assert abs(adaptive_quad(f, a, b)[0] - exact) <= 1e-13 * max(1.0, abs(exact))


def test_adaptive_quad_convergence_error_carries_estimate():
    with pytest.raises(ConvergenceError) as exc:
        adaptive_quad(lambda t: math.sin(1e4 * t) / max(t, 1e-300) ** 0.5, 0.0, 10.0,
                      QuadratureSpec(1e-14, 1e-14, 3))
    assert exc.value.estimate is not None and exc.value.error_bound is not None


def test_adaptive_quad_requires_ordered_bounds():
    with pytest.raises(DomainError):
        adaptive_quad(math.sin, 1.0, 1.0)


def test_phase_integral_trivial():
    assert quadratic_phase_integral(-0.4, 1.1, 0.0, 0.0) == pytest.approx(1.5, abs=1e-13)


@settings(max_examples=100)
@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-20, 20).filter(lambda x: abs(x) > 1e-6))
def test_phase_integral_matches_antiderivative(lo, w, x):
    hi = lo + w
    exact = (np.exp(1j * hi * x) - np.exp(1j * lo * x)) / (1j * x)
    assert abs(quadratic_phase_integral(lo, hi, x, 0.0) - exact) <= 1e-12 * max(1.0, abs(exact)) + 1e-12


def test_phase_integral_fresnel_case():
    ref = riemann_phase(-1.0, 1.0, 2.0, 1.0)
    assert abs(quadratic_phase_integral(-1.0, 1.0, 2.0, 1.0) - ref) <= 1e-8


def test_phase_integral_fresnel_closed_form():
    # second oracle: complete the square and use scipy's Fresnel integrals
    from scipy.special import fresnel
    lo, hi, x, c = -0.5, 2.0, 3.0, 0.8
    s = math.sqrt(2 * c / math.pi)
    k_star = x / (2 * c)
    S1, C1 = fresnel(s * (hi - k_star))
    S0, C0 = fresnel(s * (lo - k_star))
    val = np.exp(1j * x * x / (4 * c)) * ((C1 - C0) - 1j * (S1 - S0)) / s
    assert abs(quadratic_phase_integral(lo, hi, x, c) - val) <= 1e-10


def test_phase_integral_budget_exhaustion():
    with pytest.raises(ConvergenceError) as exc:
        quadratic_phase_integral(-50, 50, 400.0, 3.0, QuadratureSpec(max_subdivisions=16))
    assert exc.value.estimate is not None


def test_band_integrals_vectorised_and_error_bounds():
    xs = np.linspace(-10, 10, 41)
    vals, errs = band_integrals(0.5, 1.5, xs, 0.3)
    single = np.array([quadratic_phase_integral(0.5, 1.5, x, 0.3) for x in xs])
    assert np.allclose(vals, single, atol=1e-10)
    assert np.all(errs <= 1e-8)


def test_panel_integral_gaussian():
    v, _ = panel_integral(lambda x: np.exp(-x * x), -10, 10, 1.0)
    assert v == pytest.approx(math.sqrt(math.pi), abs=1e-13)
