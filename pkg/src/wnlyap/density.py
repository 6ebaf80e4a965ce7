"""Stationary density of the phase process z = -cot(theta).

The invariant density is ``p(x) = C q(x)`` with the shifted tail integral

    q(x) = int_0^inf exp(-[V(x+s) - V(x)]) ds,
    V(x) = nu (x^3/3 + kappa x),   kappa = +1 (lambda > 0), -1 (lambda < 0),

so no ``exp(V(x))`` factor is ever formed.  ``q`` is always integrated in the
log domain; the kernel's ``log_mode`` only controls whether public helpers
return values or their logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Sign
from .quad import QuadSpec, log_integrate, integrate_real_line

# above this nu (lambda < 0) q reaches exp(4 nu / 3) and only its log is representable
LOG_MODE_NU = 200.0


@dataclass(frozen=True)
class DriftPotential:
    sign: Sign
    nu: float

    def __post_init__(self):
        if self.sign is Sign.ZERO:
            raise ValueError("the drift potential needs lambda != 0")
        if not (self.nu > 0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be positive and finite, got {self.nu}")

    @property
    def kappa(self) -> float:
        return 1.0 if self.sign is Sign.POSITIVE else -1.0


def potential_value(pot: DriftPotential, x):
    """nu (x + x^3/3) for lambda > 0, nu (x^3/3 - x) for lambda < 0."""
    x = np.asarray(x, dtype=float)
    out = pot.nu * (x**3 / 3.0 + pot.kappa * x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DensityKernel:
    potential: DriftPotential
    spec: QuadSpec = field(default_factory=QuadSpec)
    log_mode: bool | None = None

    def __post_init__(self):
        needs_log = self.potential.sign is Sign.NEGATIVE and self.potential.nu > LOG_MODE_NU
        if self.log_mode is None:
            object.__setattr__(self, "log_mode", needs_log)
        elif needs_log and not self.log_mode:
            raise ValueError(
                f"log_mode is required for lambda < 0 with nu > {LOG_MODE_NU:g} "
                f"(got nu={self.potential.nu:g})"
            )

    @property
    def nu(self) -> float:
        return self.potential.nu

    @property
    def kappa(self) -> float:
        return self.potential.kappa


def make_kernel(sign: Sign, nu: float, spec: QuadSpec | None = None,
                log_mode: bool | None = None) -> DensityKernel:
    return DensityKernel(DriftPotential(sign, nu), spec or QuadSpec(), log_mode)


def _positive_lengths(*cands):
    vals = [c for c in cands if c > 0 and math.isfinite(c)]
    return min(vals) if vals else 1.0


def inner_layout(pot: DriftPotential, x: float):
    """Breakpoints and tail scale for the s-integral defining q(x)."""
    nu, kappa = pot.nu, pot.kappa
    points = []
    if kappa < 0:
        # exponent has a local max at x+s = -1 and a min at x+s = +1
        for s in (-1.0 - x, 1.0 - x):
            if s > 0:
                points.append(s)
    s0 = points[-1] if points else 0.0
    t0 = x + s0
    d1 = nu * (t0 * t0 + kappa)
    d2 = 2.0 * nu * t0
    scale = _positive_lengths(
        1.0 / d1 if d1 > 0 else math.inf,
        1.0 / math.sqrt(d2) if d2 > 0 else math.inf,
        (3.0 / nu) ** (1.0 / 3.0),
    )
    return points, scale


def log_q_result(k: DensityKernel, x: float):
    """Log of the unnormalised density with the quadrature error record."""
    x = float(x)
    nu, kappa = k.nu, k.kappa
    lin = x * x + kappa

    def log_f(s):
        return -nu * (s * (lin + s * (x + s / 3.0)))

    points, scale = inner_layout(k.potential, x)
    return log_integrate(log_f, 0.0, math.inf, k.spec, points=points, scale=scale)


def unnormalized_density(k: DensityKernel, x: float) -> float:
    """q(x), or log q(x) when the kernel is in log mode."""
    lq = log_q_result(k, x).log_value
    return lq if k.log_mode else math.exp(lq)


def normalization_layout(pot: DriftPotential):
    nu = pot.nu
    if pot.kappa > 0:
        return [], _positive_lengths(1.0 / math.sqrt(2.0 * nu), (1.5 / nu) ** (1.0 / 6.0))
    return [1.0], _positive_lengths(1.0 / math.sqrt(16.0 * nu), 1.0)


def log_normalization_result(k: DensityKernel):
    """log C together with the quadrature record of the u-integral.

    C^{-1} = sqrt(2 pi / nu) int_0^inf exp(-2 V(x)) x^{-1/2} dx
           = 2 sqrt(2 pi / nu) int_0^inf exp(-2 V(u^2)) du      (x = u^2)
    """
    nu, kappa = k.nu, k.kappa

    def log_f(u):
        u2 = u * u
        return -2.0 * nu * u2 * (u2 * u2 / 3.0 + kappa)

    points, scale = normalization_layout(k.potential)
    res = log_integrate(log_f, 0.0, math.inf, k.spec, points=points, scale=scale)
    log_c_inv = math.log(2.0) + 0.5 * math.log(2.0 * math.pi / nu) + res.log_value
    return -log_c_inv, res


def normalization_constant(k: DensityKernel) -> float:
    """C, or log C when the kernel is in log mode."""
    log_c, _ = log_normalization_result(k)
    return log_c if k.log_mode else math.exp(log_c)


def outer_layout(pot: DriftPotential):
    """Breakpoints and tail scale for integrals of p(x) over the real line."""
    nu = pot.nu
    points = {-1.0, 0.0, 1.0}
    width = nu ** (-1.0 / 3.0)
    if nu < 1.0:
        points.update({-width, width, -4.0 * width, 4.0 * width})
    if pot.kappa < 0 and nu > 1.0:
        # mass collects around the stable point z = -1 with spread 1/sqrt(2 nu)
        w = 1.0 / math.sqrt(2.0 * nu)
        points.update({-1.0 - 8.0 * w, -1.0 - 2.0 * w, -1.0 + 2.0 * w, -1.0 + 8.0 * w})
    return sorted(points), max(1.0, width)


class DensityEvaluator:
    """Normalised density p = C q with inner integrals memoised per abscissa."""

    def __init__(self, k: DensityKernel):
        self.kernel = k
        self.log_c, res = log_normalization_result(k)
        self.log_c_rel_err = res.rel_err
        self.max_inner_rel_err = 0.0
        self.inner_evaluations = 0
        self._memo: dict[float, float] = {}

    def log_q(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.empty(xs.size)
        memo = self._memo
        for i, x in enumerate(xs.ravel()):
            v = memo.get(x)
            if v is None:
                res = log_q_result(self.kernel, x)
                v = res.log_value
                memo[x] = v
                self.inner_evaluations += res.evaluations
                self.max_inner_rel_err = max(self.max_inner_rel_err, res.rel_err)
            out[i] = v
        return out.reshape(xs.shape)

    def density(self, xs) -> np.ndarray:
        return np.exp(self.log_c + self.log_q(xs))

    def integrate(self, weight, spec: QuadSpec | None = None):
        """int p(x) weight(x) dx over the real line."""
        points, scale = outer_layout(self.kernel.potential)

        def f(x):
            return self.density(x) * weight(x)

        return integrate_real_line(f, spec or self.kernel.spec, points=points, scale=scale)

    @property
    def rel_err(self) -> float:
        return self.log_c_rel_err + self.max_inner_rel_err


def density(k: DensityKernel, xs) -> np.ndarray:
    return DensityEvaluator(k).density(xs)


def normalization_cross_check(k: DensityKernel) -> float:
    """|C int q dx - 1|, comparing the closed-form C with direct normalisation."""
    ev = DensityEvaluator(k)
    res = ev.integrate(np.ones_like)
    return abs(res.value - 1.0)


def stationarity_residual(k: DensityKernel, xs, h: float | None = None) -> float:
    """Max deviation from the constant-flux form of the stationary equation.

    Integrating (1/nu) p'' - ((x^2 + kappa) p)' = 0 once gives
    (1/nu) p' - (x^2 + kappa) p = -C/nu.  p' is taken by a fourth-order
    central difference with step h.  The residual is divided by the flux
    C/nu plus the largest magnitude of the two terms on the left.  For
    lambda > 0 and for moderate nu these are all of the same order.  For
    lambda < 0 and large nu the flux is of order exp(-4 nu/3) and lies below
    double-precision resolution of the terms it balances, so the term
    magnitudes set the scale there.
    """
    ev = DensityEvaluator(k)
    nu, kappa = k.nu, k.kappa
    xs = np.asarray(xs, dtype=float)
    if h is None:
        # a thousandth of the density's width: nu^{-1/3} for small nu, 1/sqrt(nu) for large
        h = 1e-3 * (nu ** (-1.0 / 3.0) if nu < 1 else 1.0 / math.sqrt(nu))
    p = lambda x: ev.density(x)
    dp = (-p(xs + 2 * h) + 8 * p(xs + h) - 8 * p(xs - h) + p(xs - 2 * h)) / (12 * h)
    flux = math.exp(ev.log_c) / nu
    transport = (xs * xs + kappa) * p(xs)
    resid = dp / nu - transport + flux
    scale = flux + float(np.max(np.maximum(np.abs(dp) / nu, np.abs(transport))))
    return float(np.max(np.abs(resid)) / scale)
