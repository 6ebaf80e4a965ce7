"""Monte Carlo estimate of gamma from the phase SDE.

The phase z = -cot(theta) obeys

    dz = omega (z^2 + kappa) dx - (sigma/omega) dW,   kappa = +1 (lambda > 0), -1 (lambda < 0),

and log r grows with drift a (1 - z^2)/(1 + z^2)^2 - [lambda < 0] 2 omega z/(1 + z^2),
a = sigma^2 / (2 omega^2).  The martingale part of d log r averages out and is
not accumulated.

z reaches +inf in finite x and re-enters at -inf.  Rather than clipping at a
large threshold, the integrator switches to the reciprocal chart y = -1/z
whenever |z| > chart_switch (and back when |y| > chart_switch).  In the y
chart the passage through infinity is the smooth crossing y: 0- -> 0+, and
Ito's formula gives

    dy = [omega (1 + kappa y^2) + (sigma/omega)^2 y^3] dx - (sigma/omega) y^2 dW.

Each crossing is counted as one reset.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .model import Sign, SpectralPoint

BLOCK = 1 << 15

# status codes returned by the kernel
_RUNNING, _DONE, _NAN = 0, 1, 2


class McError(RuntimeError):
    pass


@dataclass(frozen=True)
class McConfig:
    """Simulation parameters.

    ``length`` defaults to ``400 / gamma_guess`` where the guess comes from the
    uniform asymptotics; with 64 chains that gives a standard error near
    0.4% of gamma on the nu = 1 benchmarks.  The base step is ``step_max * min(1/omega, omega^2/sigma^2)``,
    further capped by ``0.1 / (omega (1 + c^2))`` in the active chart.
    """

    point: SpectralPoint
    step_max: float = 1e-3
    length: float | None = None
    chains: int = 64
    seed: int = 12345
    chart_switch: float = 2.0
    burn_in: float | None = None
    z0: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.point.sign is Sign.ZERO or self.point.omega == 0.0:
            raise ValueError("the phase SDE needs omega > 0")
        if self.chains < 2:
            raise ValueError("need at least 2 chains to estimate the variance")
        if not self.step_max > 0:
            raise ValueError("step_max must be positive")
        if self.length is not None and not self.length > 0:
            raise ValueError("length must be positive")
        if self.burn_in is not None and not (0 <= self.burn_in < self.resolved_length()):
            raise ValueError("burn_in must lie in [0, length)")
        if not self.chart_switch > 1.0:
            raise ValueError("chart_switch must exceed 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def resolved_length(self) -> float:
        if self.length is not None:
            return float(self.length)
        return 400.0 / gamma_guess(self.point)

    def resolved_burn_in(self) -> float:
        if self.burn_in is not None:
            return float(self.burn_in)
        return 0.05 * self.resolved_length()

    def base_step(self) -> float:
        p = self.point
        return self.step_max * min(1.0 / p.omega, p.omega**2 / p.sigma**2)


@dataclass(frozen=True)
class McResult:
    gamma_hat: float
    std_error: float
    chains_used: int
    resets_total: int
    effective_length: float
    chain_means: tuple[float, ...] = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "gamma_hat": self.gamma_hat,
            "std_error": self.std_error,
            "chains_used": self.chains_used,
            "resets_total": self.resets_total,
            "effective_length": self.effective_length,
        }


def gamma_guess(p: SpectralPoint) -> float:
    """Cheap closed-form estimate of gamma used only to size runs."""
    nu = p.nu
    small = 0.3645 * nu ** (-1.0 / 3.0)
    if p.sign is Sign.POSITIVE:
        g = min(small, 0.25 / nu) if nu > 1 else small
    else:
        g = max(small, 1.0) if nu > 1 else max(small, 0.75)
    return g * p.omega


@njit(cache=True, nogil=True)
def _advance(state, noise, dx0, omega, s_over_w, kappa, neg, switch, length, burn_in):
    """Advance one chain over a block of standard normals.

    state = [c, chart (0: z, 1: y), x, acc, resets, steps]; returns a status code.
    """
    c = state[0]
    chart = state[1]
    x = state[2]
    acc = state[3]
    resets = state[4]
    steps = state[5]
    a = 0.5 * s_over_w * s_over_w
    s2 = s_over_w * s_over_w
    status = 0
    for i in range(noise.shape[0]):
        if x >= length:
            status = 1
            break
        c2 = c * c
        dx = 0.1 / (omega * (1.0 + c2))
        if dx0 < dx:
            dx = dx0
        if x + dx > length:
            dx = length - x
        sq = math.sqrt(dx)
        den = 1.0 + c2
        if chart == 0.0:
            drift_lnr = a * (1.0 - c2) / (den * den)
            if neg:
                drift_lnr -= 2.0 * omega * c / den
            cn = c + omega * (c2 + kappa) * dx - s_over_w * sq * noise[i]
        else:
            drift_lnr = a * c2 * (c2 - 1.0) / (den * den)
            if neg:
                drift_lnr += 2.0 * omega * c / den
            cn = c + (omega * (1.0 + kappa * c2) + s2 * c2 * c) * dx - s_over_w * c2 * sq * noise[i]
            if c < 0.0 and cn >= 0.0:
                resets += 1.0
            elif c >= 0.0 and cn < 0.0:
                resets -= 1.0
        if x >= burn_in:
            acc += drift_lnr * dx
        elif x + dx > burn_in:
            acc += drift_lnr * (x + dx - burn_in)
        x += dx
        steps += 1.0
        if not math.isfinite(cn):
            status = 2
            break
        if chart == 0.0 and abs(cn) > switch:
            cn = -1.0 / cn
            chart = 1.0
        elif chart == 1.0 and abs(cn) > switch:
            cn = -1.0 / cn
            chart = 0.0
        c = cn
    if status == 0 and x >= length:
        status = 1
    state[0] = c
    state[1] = chart
    state[2] = x
    state[3] = acc
    state[4] = resets
    state[5] = steps
    return status


def chain_seeds(seed: int, chains: int) -> list[np.random.SeedSequence]:
    """Independent per-chain streams derived from (seed, chain index)."""
    return [np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(i,)) for i in range(chains)]


def _initial_state(z0: float, switch: float) -> np.ndarray:
    if abs(z0) > switch:
        return np.array([-1.0 / z0, 1.0, 0.0, 0.0, 0.0, 0.0])
    return np.array([z0, 0.0, 0.0, 0.0, 0.0, 0.0])


def simulate_chain(cfg: McConfig, chain_seed) -> tuple[float, int]:
    """Run one chain; returns (integral of the log-amplitude drift after burn-in, resets)."""
    p = cfg.point
    if not isinstance(chain_seed, np.random.SeedSequence):
        chain_seed = np.random.SeedSequence(int(chain_seed))
    rng = np.random.Generator(np.random.PCG64(chain_seed))
    state = _initial_state(cfg.z0, cfg.chart_switch)
    length = cfg.resolved_length()
    burn = cfg.resolved_burn_in()
    kappa = 1.0 if p.sign is Sign.POSITIVE else -1.0
    neg = p.sign is Sign.NEGATIVE
    noise = np.empty(BLOCK)
    while True:
        rng.standard_normal(out=noise)
        status = _advance(state, noise, cfg.base_step(), p.omega, p.sigma / p.omega,
                          kappa, neg, cfg.chart_switch, length, burn)
        if status == _DONE:
            return float(state[3]), int(round(state[4]))
        if status == _NAN:
            raise McError(f"chain state became non-finite at step {int(state[5])} (x={state[2]:.6g})")


def estimate_gamma_mc(cfg: McConfig) -> McResult:
    seeds = chain_seeds(cfg.seed, cfg.chains)
    eff = cfg.resolved_length() - cfg.resolved_burn_in()

    def run(ss):
        try:
            return simulate_chain(cfg, ss)
        except McError:
            return None

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(run, seeds))
    else:
        outcomes = [run(ss) for ss in seeds]
    good = [o for o in outcomes if o is not None]
    failed = len(outcomes) - len(good)
    if failed > 0.1 * cfg.chains or len(good) < 2:
        raise McError(f"{failed} of {cfg.chains} chains failed")
    means = np.array([o[0] for o in good]) / eff
    return McResult(
        gamma_hat=float(means.mean()),
        std_error=float(means.std(ddof=1) / math.sqrt(means.size)),
        chains_used=len(good),
        resets_total=int(sum(o[1] for o in good)),
        effective_length=eff,
        chain_means=tuple(float(m) for m in means),
    )
