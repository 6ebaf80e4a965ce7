"""Lyapunov exponent from the stationary phase density by nested quadrature.

For lambda > 0:  gamma = omega/nu * int p(x) (1 - x^2)/(1 + x^2)^2 dx.
For lambda < 0 the same functional picks up the drift term
-2 omega int p(x) x/(1 + x^2) dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import DensityEvaluator, make_kernel
from .model import GammaEstimate, Method, RegimeError, Sign, SpectralPoint
from .quad import QuadSpec


@dataclass(frozen=True)
class ExactConfig:
    quad: QuadSpec = field(default_factory=QuadSpec)
    nu_exact_range: tuple[float, float] = (1e-6, 1e4)

    def __post_init__(self):
        lo, hi = self.nu_exact_range
        if not (0 < lo < hi):
            raise ValueError(f"nu_exact_range must be positive and ordered, got {self.nu_exact_range}")


def lyapunov_weight(x):
    x2 = x * x
    return (1.0 - x2) / (1.0 + x2) ** 2


def drift_weight(x):
    return x / (1.0 + x * x)


def _check(p: SpectralPoint, cfg: ExactConfig, sign: Sign):
    if p.sign is not sign:
        raise RegimeError(f"expected sign {sign.name}, got {p.sign.name}")
    lo, hi = cfg.nu_exact_range
    if not (lo <= p.nu <= hi):
        raise RegimeError(
            f"nu={p.nu:g} is outside the exact-quadrature range [{lo:g}, {hi:g}]; "
            "use the asymptotic or uniform evaluator"
        )


def normalized_gamma(sign: Sign, nu: float, spec: QuadSpec | None = None):
    """Return (gamma/omega, abs error) for the given sign and nu."""
    ev = DensityEvaluator(make_kernel(sign, nu, spec))
    r1 = ev.integrate(lyapunov_weight)
    value = r1.value / nu
    err = r1.err_estimate / nu
    scale = abs(r1.value) / nu
    if sign is Sign.NEGATIVE:
        r2 = ev.integrate(drift_weight)
        value -= 2.0 * r2.value
        err += 2.0 * r2.err_estimate
        scale += 2.0 * abs(r2.value)
    # C and the inner integrals carry their own relative errors into both terms
    err += scale * ev.rel_err
    return value, err


def gamma_exact_pos(p: SpectralPoint, cfg: ExactConfig | None = None) -> GammaEstimate:
    cfg = cfg or ExactConfig()
    _check(p, cfg, Sign.POSITIVE)
    g, e = normalized_gamma(Sign.POSITIVE, p.nu, cfg.quad)
    return GammaEstimate(p.omega * g, Method.EXACT_QUADRATURE, p.omega * e, p.omega, nu=p.nu)


def gamma_exact_neg(p: SpectralPoint, cfg: ExactConfig | None = None) -> GammaEstimate:
    cfg = cfg or ExactConfig()
    _check(p, cfg, Sign.NEGATIVE)
    g, e = normalized_gamma(Sign.NEGATIVE, p.nu, cfg.quad)
    return GammaEstimate(p.omega * g, Method.EXACT_QUADRATURE, p.omega * e, p.omega, nu=p.nu)


def gamma_exact(p: SpectralPoint, cfg: ExactConfig | None = None) -> GammaEstimate:
    if p.sign is Sign.POSITIVE:
        return gamma_exact_pos(p, cfg)
    if p.sign is Sign.NEGATIVE:
        return gamma_exact_neg(p, cfg)
    raise RegimeError("lambda = 0 has no exact quadrature route; use the small-nu asymptote")


def gamma_over_omega_grid(sign: Sign, nus, cfg: ExactConfig | None = None) -> np.ndarray:
    cfg = cfg or ExactConfig()
    return np.array([normalized_gamma(sign, float(nu), cfg.quad)[0] for nu in nus])
