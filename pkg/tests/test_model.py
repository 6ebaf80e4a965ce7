import math

import pytest
from hypothesis import given, strategies as st

from wnlyap.model import (GammaEstimate, Method, RegimeKind, RegimeThresholds, Sign,
                          classify_regime, make_spectral_point, point_from_nu)


def test_spectral_point_examples():
    p = make_spectral_point(1.0, math.sqrt(2.0))
    assert (p.omega, p.sign) == (1.0, Sign.POSITIVE)
    assert abs(p.nu - 1.0) < 1e-14
    p = make_spectral_point(0.0, 1.0)
    assert (p.omega, p.nu, p.sign) == (0.0, 0.0, Sign.ZERO)
    p = make_spectral_point(-4.0, 2.0)
    assert (p.omega, p.nu, p.sign) == (2.0, 4.0, Sign.NEGATIVE)


@pytest.mark.parametrize("lam,sigma", [(1.0, 0.0), (1.0, -1.0), (math.nan, 1.0), (1.0, math.inf)])
def test_spectral_point_rejects(lam, sigma):
    with pytest.raises(ValueError):
        make_spectral_point(lam, sigma)


def test_point_from_nu_keeps_nu():
    p = point_from_nu(2.0, Sign.NEGATIVE, 0.37)
    assert p.nu == 0.37 and p.lam == -4.0
    assert abs(2 * p.omega**3 / p.sigma**2 - 0.37) < 1e-14
    with pytest.raises(ValueError):
        point_from_nu(1.0, Sign.ZERO, 1.0)


def test_classify_examples():
    assert classify_regime(point_from_nu(1, Sign.POSITIVE, 1e-4)).kind is RegimeKind.SMALL_NU
    assert classify_regime(point_from_nu(1, Sign.POSITIVE, 1.0)).kind is RegimeKind.BULK
    assert classify_regime(point_from_nu(1, Sign.NEGATIVE, 50.0)).kind is RegimeKind.LARGE_NU_NEG
    assert classify_regime(point_from_nu(1, Sign.NEGATIVE, 10.0)).kind is RegimeKind.BULK
    assert classify_regime(point_from_nu(1, Sign.POSITIVE, 10.0)).kind is RegimeKind.LARGE_NU_POS
    assert classify_regime(make_spectral_point(0.0, 1.0)).kind is RegimeKind.SMALL_NU


def test_classify_boundaries_go_to_asymptotic_side():
    th = RegimeThresholds()
    assert classify_regime(point_from_nu(1, Sign.POSITIVE, th.nu_lo)).kind is RegimeKind.SMALL_NU
    assert classify_regime(point_from_nu(1, Sign.POSITIVE, th.nu_hi_pos)).kind is RegimeKind.LARGE_NU_POS
    assert classify_regime(point_from_nu(1, Sign.NEGATIVE, th.nu_hi_neg)).kind is RegimeKind.LARGE_NU_NEG


def test_thresholds_validation_and_scaling():
    with pytest.raises(ValueError):
        RegimeThresholds(nu_lo=10.0)
    th = RegimeThresholds().scaled(2.0)
    assert th.nu_hi_pos == 12.0


@given(lam=st.floats(-1e6, 1e6), sigma=st.floats(1e-6, 1e6))
def test_classify_is_total(lam, sigma):
    p = make_spectral_point(lam, sigma)
    assert classify_regime(p).kind in set(RegimeKind)
    assert p.nu >= 0 and p.omega >= 0


def test_estimate_ratio_at_band_edge():
    e = GammaEstimate(0.29, Method.ASYMPTOTIC_SMALL_NU, 0.0, 0.0)
    assert math.isnan(e.gamma_over_omega)
    assert e.as_dict()["gamma_over_omega"] is None


def test_sign_parse():
    assert Sign.parse("pos") is Sign.POSITIVE
    assert Sign.parse("Negative") is Sign.NEGATIVE
    with pytest.raises(ValueError):
        Sign.parse("sideways")
