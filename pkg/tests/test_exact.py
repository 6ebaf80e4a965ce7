import math

import numpy as np
import pytest

from oracles import airy_gamma_over_omega
from wnlyap.exact import ExactConfig, gamma_exact, gamma_exact_neg, gamma_exact_pos, gamma_over_omega_grid
from wnlyap.model import Method, RegimeError, Sign, make_spectral_point, point_from_nu
from wnlyap.quad import QuadSpec

POS, NEG = Sign.POSITIVE, Sign.NEGATIVE


@pytest.mark.parametrize("sign", [POS, NEG])
@pytest.mark.parametrize("nu", [1e-6, 1e-4, 1e-2, 0.3, 1.0, 5.0, 40.0, 300.0, 1e3, 1e4])
def test_against_airy_closed_form(sign, nu):
    e = gamma_exact(point_from_nu(1.0, sign, nu))
    ref = airy_gamma_over_omega(nu, sign.value)
    assert abs(e.gamma_over_omega - ref) <= 1e-9 * ref
    assert e.abs_error < 1e-8 * ref


def test_small_nu_examples():
    pos = gamma_exact_pos(point_from_nu(1.0, POS, 1e-3)).gamma_over_omega
    neg = gamma_exact_neg(point_from_nu(1.0, NEG, 1e-3)).gamma_over_omega
    asym = 0.3645 * 1e-3 ** (-1.0 / 3.0)
    # lambda < 0 is within its 0.8% threshold; lambda > 0 sits just outside 0.7%
    assert abs(neg - asym) / neg <= 0.008
    assert 0.007 < abs(pos - asym) / pos < 0.0075


def test_large_nu_examples():
    g = gamma_exact_pos(point_from_nu(1.0, POS, 10.0)).gamma_over_omega
    assert abs(g - 0.02476563) / g <= 0.004
    g = gamma_exact_neg(point_from_nu(1.0, NEG, 40.0)).gamma_over_omega
    assert abs(g - 1.0) <= 0.007


def test_dispatch():
    e = gamma_exact(make_spectral_point(1.0, math.sqrt(2.0)))
    assert e.method is Method.EXACT_QUADRATURE and abs(e.nu - 1.0) < 1e-12
    e = gamma_exact(make_spectral_point(-4.0, 2.0))
    assert e.nu == 4.0 and e.omega == 2.0
    assert abs(e.gamma_over_omega - airy_gamma_over_omega(4.0, -1)) < 1e-9
    with pytest.raises(RegimeError):
        gamma_exact(make_spectral_point(0.0, 1.0))


def test_sign_and_range_checks():
    with pytest.raises(RegimeError):
        gamma_exact_pos(point_from_nu(1.0, NEG, 1.0))
    with pytest.raises(RegimeError):
        gamma_exact_neg(point_from_nu(1.0, NEG, 1e5))
    with pytest.raises(ValueError):
        ExactConfig(nu_exact_range=(1.0, 0.5))


@pytest.mark.parametrize("sign", [POS, NEG])
@pytest.mark.parametrize("nu", [0.01, 1.0, 10.0])
def test_scaling_law(sign, nu):
    tol = 1e-10
    cfg = ExactConfig(quad=QuadSpec(rel_tol=tol))
    vals = []
    for omega in (0.5, 1.0, 3.0):
        sigma = math.sqrt(2 * omega**3 / nu)
        e = gamma_exact(make_spectral_point(sign.value * omega**2, sigma), cfg)
        vals.append(e.gamma_over_omega)
    assert max(vals) - min(vals) <= 10 * tol * max(vals)


def test_positivity_grid():
    nus = np.geomspace(1e-6, 1e3, 10)
    for sign in (POS, NEG):
        assert np.all(gamma_over_omega_grid(sign, nus) > 0)


def test_monotone_decreasing_positive():
    g = gamma_over_omega_grid(POS, np.geomspace(1e-4, 1e3, 50))
    assert np.all(np.diff(g) < 0)


def test_tolerance_controls_accuracy():
    ref = airy_gamma_over_omega(1.0, 1)
    loose = gamma_exact(point_from_nu(1, POS, 1.0), ExactConfig(quad=QuadSpec(rel_tol=1e-5)))
    assert abs(loose.gamma_over_omega - ref) <= 1e-5 * ref
