import math

import pytest
from scipy.special import gamma as gamma_fn

from oracles import C_CLOSED, C_QUOTED, airy_gamma_over_omega, mp_b_integral, mp_normalization
from wnlyap.asympt import (A0, a_coefficient, b_coefficient, constant_c, cubic_moment,
                           default_constants, gamma_asympt, gamma_asympt_large_nu_neg,
                           gamma_asympt_large_nu_pos, gamma_asympt_small_nu, gamma_uniform,
                           kernel_Q, q_taylor_coefficients, series_C_inverse_small_nu,
                           series_C_large_nu, symmetric_pair)
from wnlyap.density import make_kernel, normalization_constant
from wnlyap.model import Method, RegimeError, RegimeThresholds, Sign, make_spectral_point, point_from_nu
from wnlyap.quad import QuadSpec

POS, NEG = Sign.POSITIVE, Sign.NEGATIVE
TIGHT = QuadSpec(rel_tol=1e-13)


def test_kernel_Q_values():
    assert abs(kernel_Q(0.0) - 3 ** (1 / 3) * gamma_fn(4 / 3)) < 1e-12
    assert kernel_Q(1.0) < kernel_Q(0.0)
    # derivative at 0 is -int t^2 exp(-t^3/3) dt = -1
    h = 1e-4
    d = (kernel_Q(h, TIGHT) - kernel_Q(-h, TIGHT)) / (2 * h)
    assert abs(d + 1.0) < 1e-6


def test_kernel_Q_trapezoid():
    import numpy as np
    t = np.linspace(0, 30, 600001)
    f = np.exp(-t * (1 + t * (1 + t / 3)))
    oracle = np.trapezoid(f, t) + (t[1] - t[0]) ** 2 / 12 * (-1.0)
    assert abs(kernel_Q(1.0) - oracle) < 1e-10


def test_kernel_Q_negative_tail_decays():
    # Q(s) ~ 1/s^2 as s -> -inf
    for s in (-20.0, -40.0):
        assert abs(kernel_Q(s) * s * s - 1.0) < 0.05
    # so Q is not monotone: it peaks near s = -0.7 and is decreasing only to the right of that
    assert kernel_Q(-0.7) > kernel_Q(0.0) > kernel_Q(1.0)
    assert kernel_Q(-0.7) > kernel_Q(-3.0)


def test_taylor_coefficients():
    q = q_taylor_coefficients()
    assert abs(q[0] - kernel_Q(0.0)) < 1e-13
    assert abs(q[1] + 1.0) < 1e-13
    assert abs(q[2]) < 1e-13
    assert abs(q[4] + 0.25) < 1e-13
    assert abs(cubic_moment(2) - 1.0) < 1e-14


def test_symmetric_pair_at_zero_against_finite_differences():
    pair0 = symmetric_pair(0.0)

    def fd(h):
        return (2 * kernel_Q(0.0, TIGHT) - kernel_Q(h, TIGHT) - kernel_Q(-h, TIGHT)) / h**2

    rich = (4 * fd(0.02) - fd(0.04)) / 3
    assert abs(pair0 - rich) < 1e-6


@pytest.mark.parametrize("s", [0.05, 0.0999, 0.1001, 0.5, 0.999, 1.001, 3.0])
def test_symmetric_pair_branches_agree(s):
    direct = (2 * kernel_Q(0.0, TIGHT) - kernel_Q(s, TIGHT) - kernel_Q(-s, TIGHT)) / s**2
    # the direct difference loses about 1e-13 / s^2 to cancellation
    assert abs(symmetric_pair(s) - direct) < 1e-8


def test_constant_c():
    c = constant_c()
    assert abs(c - C_CLOSED) < 1e-10
    assert abs(2 ** (1 / 3) * c - C_QUOTED) <= 5e-4
    assert abs(constant_c(QuadSpec(rel_tol=1e-9)) - constant_c(QuadSpec(rel_tol=1e-6))) < 1e-6
    k = default_constants()
    assert k.c_quoted_check == pytest.approx(2 ** (1 / 3) * k.c_small_nu)


def test_b_integral_vanishes():
    assert abs(mp_b_integral()) < 1e-15


def test_small_nu_formula():
    c = C_CLOSED
    e = gamma_asympt_small_nu(make_spectral_point(0.0, 1.0), c)
    assert e.gamma == pytest.approx(c)
    e = gamma_asympt_small_nu(make_spectral_point(0.0, 8.0), c)
    assert e.gamma == pytest.approx(4 * c)
    e = gamma_asympt_small_nu(point_from_nu(1.0, POS, 1e-3), c)
    assert e.gamma_over_omega == pytest.approx(2 ** (1 / 3) * c * 10, rel=1e-12)
    assert abs(e.gamma_over_omega - 3.645) < 1e-3


def test_large_nu_pos_formula():
    e = gamma_asympt_large_nu_pos(point_from_nu(1.0, POS, 10.0))
    assert e.gamma_over_omega == pytest.approx(0.02476563, abs=1e-8)
    e = gamma_asympt_large_nu_pos(point_from_nu(1.0, POS, 6.0))
    assert e.gamma_over_omega == pytest.approx(0.0405816, abs=1e-7)
    assert abs(e.gamma_over_omega - airy_gamma_over_omega(6.0, 1)) / airy_gamma_over_omega(6.0, 1) <= 0.004
    # leading term sigma^2/(8 omega^2)
    p = make_spectral_point(4.0, 1e-3)
    assert gamma_asympt_large_nu_pos(p).gamma == pytest.approx(p.sigma**2 / 32, rel=1e-12)
    with pytest.raises(RegimeError):
        gamma_asympt_large_nu_pos(point_from_nu(1.0, POS, 0.5))
    with pytest.raises(RegimeError):
        gamma_asympt_large_nu_pos(point_from_nu(1.0, NEG, 10.0))


def test_large_nu_neg_formula():
    e = gamma_asympt_large_nu_neg(point_from_nu(2.0, NEG, 40.0))
    assert e.gamma == 2.0
    assert abs(airy_gamma_over_omega(40.0, -1) - 1.0) <= 0.007
    e = gamma_asympt_large_nu_neg(point_from_nu(1.0, NEG, 100.0))
    assert e.gamma == 1.0 and e.abs_error == pytest.approx(0.01)
    e = gamma_asympt_large_nu_neg(make_spectral_point(-1.0, 1e-6))
    assert e.gamma == 1.0
    with pytest.raises(RegimeError):
        gamma_asympt_large_nu_neg(point_from_nu(1.0, POS, 100.0))


def test_a_coefficients():
    assert a_coefficient(0) == pytest.approx(math.sqrt(math.pi) * 2 ** (1 / 3) * 3 ** (-5 / 6) * gamma_fn(1 / 6), rel=1e-15)
    # mpmath value of the closed form; the four-digit 4.9757 sometimes quoted is a rounding slip
    assert A0 == pytest.approx(4.97605395105953, rel=1e-13)
    assert all(a_coefficient(n) > 0 for n in range(5))
    expected = [4.976053951, 3.627598728, 2.644559859, 1.658684650, 0.906899682]
    for n, v in enumerate(expected):
        assert a_coefficient(n) == pytest.approx(v, rel=1e-9)


def test_small_nu_series_against_quadrature():
    nu = 1e-4
    c_inv = 1.0 / normalization_constant(make_kernel(POS, nu))
    assert abs(series_C_inverse_small_nu(nu, 1) - c_inv) / c_inv <= 0.01
    # more terms converge on the quadrature value, for both signs
    for sign in (POS, NEG):
        c_inv = 1.0 / normalization_constant(make_kernel(sign, 1e-3))
        errs = [abs(series_C_inverse_small_nu(1e-3, n, sign) - c_inv) for n in (1, 2, 3, 5)]
        assert errs == sorted(errs, reverse=True)


def test_b_coefficients():
    assert abs(b_coefficient(0) - math.pi) < 1e-12
    signs = [math.copysign(1, b_coefficient(n)) for n in range(5)]
    assert signs == [1, -1, 1, -1, 1]
    assert b_coefficient(1) == pytest.approx(-0.49087385, rel=1e-7)


def test_large_nu_series():
    exact10 = mp_normalization(10.0, 1)
    two = series_C_large_nu(10.0, 2)
    assert two == pytest.approx(3.1881, abs=1e-4)
    # the two-term truncation is off by about 5e-5 relative at nu = 10
    assert abs(two - exact10) / exact10 < 1e-4
    assert abs(series_C_large_nu(10.0, 4) - exact10) / exact10 < 2e-6
    nu = 30.0
    c = normalization_constant(make_kernel(POS, nu))
    ratio = (c * math.pi / nu - 1.0) / (5.0 / 32.0 / nu**2)
    assert abs(ratio - 1.0) <= 0.05


def test_series_argument_checks():
    with pytest.raises(ValueError):
        series_C_inverse_small_nu(2.0, 1)
    with pytest.raises(ValueError):
        series_C_large_nu(0.5, 1)
    with pytest.raises(ValueError):
        a_coefficient(-1)


def test_uniform_dispatch():
    c = default_constants().c_small_nu
    e = gamma_uniform(make_spectral_point(0.0, 1.0))
    assert e.method is Method.UNIFORM and e.sub_method is Method.ASYMPTOTIC_SMALL_NU
    assert e.gamma == pytest.approx(c)
    e = gamma_uniform(make_spectral_point(1.0, math.sqrt(2.0)))
    assert e.sub_method is Method.EXACT_QUADRATURE
    assert e.gamma_over_omega == pytest.approx(airy_gamma_over_omega(1.0, 1), rel=1e-9)
    e = gamma_uniform(make_spectral_point(-1.0, 0.1))
    assert e.sub_method is Method.ASYMPTOTIC_LARGE_NU_NEG and e.gamma == 1.0


@pytest.mark.parametrize("sign", [POS, NEG])
def test_uniform_continuity_at_seams(sign):
    th = RegimeThresholds()
    hi = th.nu_hi_pos if sign is POS else th.nu_hi_neg
    for seam in (th.nu_lo, hi):
        below = gamma_uniform(point_from_nu(1.0, sign, seam * (1 - 1e-9))).gamma
        above = gamma_uniform(point_from_nu(1.0, sign, seam * (1 + 1e-9))).gamma
        assert abs(below - above) / above <= 0.01


def test_small_nu_sign_independence():
    a, b = airy_gamma_over_omega(1e-4, 1), airy_gamma_over_omega(1e-4, -1)
    assert abs(a - b) / a < 0.005


def test_gamma_asympt_auto():
    assert gamma_asympt(point_from_nu(1.0, POS, 0.5)).method is Method.ASYMPTOTIC_SMALL_NU
    assert gamma_asympt(point_from_nu(1.0, POS, 2.0)).method is Method.ASYMPTOTIC_LARGE_NU_POS
    assert gamma_asympt(point_from_nu(1.0, NEG, 2.0)).method is Method.ASYMPTOTIC_LARGE_NU_NEG
    with pytest.raises(ValueError):
        gamma_asympt(point_from_nu(1.0, NEG, 2.0), which="middle")
