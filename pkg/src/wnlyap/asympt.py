"""Asymptotic formulas for gamma in the small-nu and large-nu limits.

Error fields on the asymptotic estimates are order-of-magnitude indicators
taken from the size of the first neglected term.  They are not bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn

from .exact import ExactConfig, gamma_exact
from .model import (GammaEstimate, Method, RegimeError, RegimeKind, RegimeThresholds,
                    Sign, SpectralPoint, classify_regime)
from .quad import QuadSpec, integrate_semi_infinite

# 3^{5/6} / (sqrt(pi) 2^{2/3} Gamma(1/6)) multiplies the principal-value integral
C_PREFACTOR = 3.0 ** (5.0 / 6.0) / (math.sqrt(math.pi) * 2.0 ** (2.0 / 3.0) * gamma_fn(1.0 / 6.0))
A0 = math.sqrt(math.pi) * 2.0 ** (1.0 / 3.0) * 3.0 ** (-5.0 / 6.0) * gamma_fn(1.0 / 6.0)
SERIES_TERMS = 5


def a_coefficient(n: int) -> float:
    """Coefficient a_n of the small-nu expansion of C^{-1}.

    From C^{-1} = (1/3) sqrt(2 pi / nu) (3/(2 nu))^{1/6} int t^{-5/6} e^{-t - (12 nu^2 t)^{1/3}} dt,
    expanding the second exponential and integrating term by term.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    pref = math.sqrt(2.0 * math.pi) * 1.5 ** (1.0 / 6.0) / 3.0
    return pref * 12.0 ** (n / 3.0) * gamma_fn(1.0 / 6.0 + n / 3.0) / math.factorial(n)


def b_coefficient(n: int) -> float:
    """Coefficient b_n of C^{-1} = sum b_n nu^{-2n-1} (large nu, lambda > 0)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return (-1) ** n / math.factorial(n) * math.sqrt(math.pi) * gamma_fn(3 * n + 0.5) / 12.0**n


@dataclass(frozen=True)
class AsymptoticConstants:
    c_small_nu: float
    a0: float
    b: tuple[float, ...]

    @property
    def c_quoted_check(self) -> float:
        """2^{1/3} c, the prefactor of nu^{-1/3} in the small-nu gamma/omega."""
        return 2.0 ** (1.0 / 3.0) * self.c_small_nu


def _q_integrand(s: float):
    def f(t):
        return np.exp(-t * (s * s + t * (s + t / 3.0)))
    return f


def _q_scale(s: float) -> float:
    return 1.0 / (1.0 + s * s)


def kernel_Q(s: float, spec: QuadSpec | None = None) -> float:
    """Q(s) = int_0^inf exp(-[(t+s)^3 - s^3]/3) dt."""
    s = float(s)
    return integrate_semi_infinite(_q_integrand(s), 0.0, spec or QuadSpec(), scale=_q_scale(s)).value


def cubic_moment(n: int) -> float:
    """int_0^inf t^n exp(-t^3/3) dt = 3^{(n+1)/3 - 1} Gamma((n+1)/3)."""
    return 3.0 ** ((n + 1) / 3.0 - 1.0) * gamma_fn((n + 1) / 3.0)


@lru_cache(maxsize=None)
def q_taylor_coefficients(kmax: int = 16) -> tuple[float, ...]:
    """Coefficients of Q(s) = sum_k q_k s^k about s = 0.

    exp(-s t^2 - s^2 t) expands to sum_m (-1)^m/m! sum_j binom(m, j) s^{2m-j} t^{m+j}.
    """
    coef = [0.0] * (kmax + 1)
    for m in range(kmax + 1):
        for j in range(m + 1):
            k = 2 * m - j
            if k <= kmax:
                coef[k] += (-1) ** m / math.factorial(m) * math.comb(m, j) * cubic_moment(m + j)
    return tuple(coef)


TAYLOR_RADIUS = 0.1


def symmetric_pair(s: float, spec: QuadSpec | None = None) -> float:
    """[2 Q(0) - Q(s) - Q(-s)] / s^2, continuous at s = 0.

    Below TAYLOR_RADIUS the even Taylor coefficients of Q are summed directly
    (q_2 vanishes, so the pair starts at order s^2).  For |s| <= 1 the
    bracket is integrated as one piece,
    2 - 2 e^{-s^2 t} cosh(s t^2) = -2 [expm1(-s^2 t) cosh(s t^2) + 2 sinh^2(s t^2 / 2)],
    which avoids the cancellation between the three Q values.
    """
    spec = spec or QuadSpec()
    s = abs(float(s))
    if s < TAYLOR_RADIUS:
        coef = q_taylor_coefficients()
        return -2.0 * sum(coef[k] * s ** (k - 2) for k in range(2, len(coef), 2))
    if s > 1.0:
        q0 = kernel_Q(0.0, spec)
        return (2.0 * q0 - kernel_Q(s, spec) - kernel_Q(-s, spec)) / (s * s)

    def f(t):
        a = s * s * t
        b = s * t * t
        with np.errstate(over="ignore", invalid="ignore"):
            inner = np.expm1(-a) * np.cosh(b) + 2.0 * np.sinh(0.5 * b) ** 2
            out = -2.0 * np.exp(-t**3 / 3.0) * inner / (s * s)
        # cosh overflows only where exp(-t^3/3) has already underflowed
        return np.where(np.isfinite(out), out, 0.0)

    return integrate_semi_infinite(f, 0.0, spec, scale=1.0).value


def pv_integral(spec: QuadSpec | None = None) -> float:
    """Principal value of int (Q(0) - Q(s))/s^2 ds over the real line, by symmetric pairing."""
    spec = spec or QuadSpec()
    inner = spec.with_rel_tol(min(spec.rel_tol * 1e-2, 1e-11))

    def f(ss):
        return np.array([symmetric_pair(s, inner) for s in np.ravel(ss)]).reshape(np.shape(ss))

    return integrate_semi_infinite(f, 0.0, spec, points=(1.0,), scale=1.0).value


def constant_c(spec: QuadSpec | None = None) -> float:
    return C_PREFACTOR * pv_integral(spec)


@lru_cache(maxsize=8)
def _constants_cached(rel_tol: float) -> AsymptoticConstants:
    c = constant_c(QuadSpec(rel_tol=rel_tol))
    return AsymptoticConstants(c, A0, tuple(b_coefficient(n) for n in range(SERIES_TERMS)))


def default_constants(rel_tol: float = 1e-10) -> AsymptoticConstants:
    return _constants_cached(float(rel_tol))


def gamma_asympt_small_nu(p: SpectralPoint, c: float) -> GammaEstimate:
    g = c * p.sigma ** (2.0 / 3.0)
    return GammaEstimate(g, Method.ASYMPTOTIC_SMALL_NU, g * p.nu ** (2.0 / 3.0), p.omega, nu=p.nu)


def gamma_asympt_large_nu_pos(p: SpectralPoint) -> GammaEstimate:
    if p.sign is not Sign.POSITIVE:
        raise RegimeError("the large-nu series applies to lambda > 0 only")
    if p.nu < 1.0:
        raise RegimeError(f"the large-nu series needs nu >= 1, got {p.nu:g}")
    g = p.sigma**2 / (8.0 * p.omega**2) * (1.0 - 15.0 / 16.0 / p.nu**2)
    return GammaEstimate(g, Method.ASYMPTOTIC_LARGE_NU_POS, g * p.nu**-4, p.omega, nu=p.nu)


def gamma_asympt_large_nu_neg(p: SpectralPoint) -> GammaEstimate:
    if p.sign is not Sign.NEGATIVE:
        raise RegimeError("gamma -> omega applies to lambda < 0 only")
    if p.nu < 1.0:
        raise RegimeError(f"the large-nu limit needs nu >= 1, got {p.nu:g}")
    return GammaEstimate(p.omega, Method.ASYMPTOTIC_LARGE_NU_NEG, p.omega / p.nu, p.omega, nu=p.nu)


def gamma_asympt(p: SpectralPoint, c: float | None = None, which: str = "auto") -> GammaEstimate:
    """The asymptotic formula for p; ``auto`` picks small-nu below nu = 1, large-nu above."""
    if which not in ("auto", "small", "large"):
        raise ValueError(f"which must be auto, small or large, got {which!r}")
    if which == "auto":
        which = "small" if (p.sign is Sign.ZERO or p.nu < 1.0) else "large"
    if which == "small":
        if c is None:
            c = default_constants().c_small_nu
        return gamma_asympt_small_nu(p, c)
    if p.sign is Sign.POSITIVE:
        return gamma_asympt_large_nu_pos(p)
    return gamma_asympt_large_nu_neg(p)


def series_C_inverse_small_nu(nu: float, n_terms: int, sign: Sign = Sign.POSITIVE) -> float:
    """Partial sum of C^{-1} = sum (-1)^n a_n nu^{2(n-1)/3} (lambda < 0 drops the (-1)^n)."""
    if not (0 < nu < 1):
        raise ValueError(f"the small-nu series needs 0 < nu < 1, got {nu}")
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    alt = -1.0 if sign is Sign.POSITIVE else 1.0
    return sum(alt**n * a_coefficient(n) * nu ** (2.0 * (n - 1) / 3.0) for n in range(n_terms))


def series_C_large_nu(nu: float, n_terms: int) -> float:
    """C from the reciprocal of the partial sum of sum b_n nu^{-2n-1}."""
    if nu <= 1:
        raise ValueError(f"the large-nu series needs nu > 1, got {nu}")
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    return 1.0 / sum(b_coefficient(n) * nu ** (-2 * n - 1) for n in range(n_terms))


def gamma_uniform(p: SpectralPoint, cfg: ExactConfig | None = None, c: float | None = None,
                  thresholds: RegimeThresholds | None = None) -> GammaEstimate:
    """Regime-dispatched gamma: asymptotes in their regimes, exact quadrature in the bulk."""
    if c is None:
        c = default_constants().c_small_nu
    kind = classify_regime(p, thresholds).kind
    if kind is RegimeKind.SMALL_NU:
        sub = gamma_asympt_small_nu(p, c)
    elif kind is RegimeKind.LARGE_NU_POS:
        sub = gamma_asympt_large_nu_pos(p)
    elif kind is RegimeKind.LARGE_NU_NEG:
        sub = gamma_asympt_large_nu_neg(p)
    else:
        sub = gamma_exact(p, cfg)
    return GammaEstimate(sub.gamma, Method.UNIFORM, sub.abs_error, p.omega,
                         sub_method=sub.method, nu=p.nu)
