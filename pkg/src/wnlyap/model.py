"""Parameter types shared by every route to the Lyapunov exponent."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Sign(Enum):
    POSITIVE = 1
    NEGATIVE = -1
    ZERO = 0

    @classmethod
    def parse(cls, text: str) -> "Sign":
        key = text.strip().lower()
        aliases = {
            "pos": cls.POSITIVE, "positive": cls.POSITIVE, "+": cls.POSITIVE,
            "neg": cls.NEGATIVE, "negative": cls.NEGATIVE, "-": cls.NEGATIVE,
            "zero": cls.ZERO, "0": cls.ZERO,
        }
        if key not in aliases:
            raise ValueError(f"unknown sign {text!r}")
        return aliases[key]


class Method(Enum):
    EXACT_QUADRATURE = "exact"
    ASYMPTOTIC_SMALL_NU = "asympt_small_nu"
    ASYMPTOTIC_LARGE_NU_POS = "asympt_large_nu_pos"
    ASYMPTOTIC_LARGE_NU_NEG = "asympt_large_nu_neg"
    MONTE_CARLO = "mc"
    UNIFORM = "uniform"


class RegimeKind(Enum):
    SMALL_NU = "small_nu"
    BULK = "bulk"
    LARGE_NU_POS = "large_nu_pos"
    LARGE_NU_NEG = "large_nu_neg"


class RegimeError(ValueError):
    """A route was asked for a point outside the parameter range it serves."""


@dataclass(frozen=True)
class SpectralPoint:
    """Energy ``lam`` and noise intensity ``sigma`` with derived omega, nu and sign."""

    lam: float
    sigma: float
    omega: float
    nu: float
    sign: Sign

    @property
    def lambda_(self) -> float:
        return self.lam


def make_spectral_point(lam: float, sigma: float) -> SpectralPoint:
    lam = float(lam)
    sigma = float(sigma)
    if not (math.isfinite(lam) and math.isfinite(sigma)):
        raise ValueError(f"non-finite parameters lambda={lam}, sigma={sigma}")
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    omega = math.sqrt(abs(lam))
    nu = 2.0 * omega**3 / sigma**2
    if lam > 0:
        sign = Sign.POSITIVE
    elif lam < 0:
        sign = Sign.NEGATIVE
    else:
        sign = Sign.ZERO
    return SpectralPoint(lam=lam, sigma=sigma, omega=omega, nu=nu, sign=sign)


def point_from_nu(omega: float, sign: Sign, nu: float) -> SpectralPoint:
    """Build the point with given omega > 0, sign and nu (sigma = sqrt(2 omega^3 / nu))."""
    if not (omega > 0 and math.isfinite(omega)):
        raise ValueError(f"omega must be positive and finite, got {omega}")
    if not (nu > 0 and math.isfinite(nu)):
        raise ValueError(f"nu must be positive and finite, got {nu}")
    if sign is Sign.ZERO:
        raise ValueError("sign must be positive or negative when omega > 0")
    sigma = math.sqrt(2.0 * omega**3 / nu)
    lam = omega * omega * sign.value
    p = make_spectral_point(lam, sigma)
    # keep the requested nu rather than the round-tripped one
    return SpectralPoint(lam=p.lam, sigma=p.sigma, omega=p.omega, nu=float(nu), sign=p.sign)


@dataclass(frozen=True)
class GammaEstimate:
    gamma: float
    method: Method
    abs_error: float
    omega: float
    sub_method: Method | None = None
    nu: float | None = None

    @property
    def gamma_over_omega(self) -> float:
        # NaN flags the undefined ratio at the band edge
        if self.omega == 0.0:
            return math.nan
        return self.gamma / self.omega

    def as_dict(self) -> dict:
        out = {
            "gamma": self.gamma,
            "gamma_over_omega": None if self.omega == 0.0 else self.gamma_over_omega,
            "method": self.method.value,
            "abs_error": self.abs_error,
        }
        if self.sub_method is not None:
            out["sub_method"] = self.sub_method.value
        if self.nu is not None:
            out["nu"] = self.nu
        return out


@dataclass(frozen=True)
class RegimeThresholds:
    nu_lo: float = 1e-3
    nu_hi_pos: float = 6.0
    nu_hi_neg: float = 40.0

    def __post_init__(self):
        if not (0 < self.nu_lo < self.nu_hi_pos and self.nu_lo < self.nu_hi_neg):
            raise ValueError("need 0 < nu_lo < nu_hi for both signs")

    def scaled(self, factor: float) -> "RegimeThresholds":
        return RegimeThresholds(self.nu_lo * factor, self.nu_hi_pos * factor, self.nu_hi_neg * factor)


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    thresholds: tuple[float, float] = field(default=(1e-3, 6.0))


def classify_regime(p: SpectralPoint, thresholds: RegimeThresholds | None = None) -> Regime:
    """Map a point to its asymptotic regime. Boundary values go to the asymptotic side."""
    th = thresholds or RegimeThresholds()
    nu_hi = th.nu_hi_neg if p.sign is Sign.NEGATIVE else th.nu_hi_pos
    bounds = (th.nu_lo, nu_hi)
    if p.sign is Sign.ZERO or p.nu <= th.nu_lo:
        return Regime(RegimeKind.SMALL_NU, bounds)
    if p.nu >= nu_hi:
        kind = RegimeKind.LARGE_NU_POS if p.sign is Sign.POSITIVE else RegimeKind.LARGE_NU_NEG
        return Regime(kind, bounds)
    return Regime(RegimeKind.BULK, bounds)
