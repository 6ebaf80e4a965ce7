"""Parameter sweeps, figure tables, and the regime-accuracy validation."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .asympt import AsymptoticConstants, default_constants, gamma_asympt
from .exact import ExactConfig, normalized_gamma
from .mc import McConfig, estimate_gamma_mc
from .model import Sign, point_from_nu

COLUMNS = (
    "nu",
    "gamma_over_omega_exact",
    "gamma_over_omega_asympt",
    "gamma_over_omega_mc",
    "mc_std_error",
    "rel_err_exact_vs_asympt",
)
METHODS = frozenset({"exact", "asympt", "mc"})
GRID_NOTE = ("validation grids are reconstructed: 8 log-spaced points per regime window, "
             "chosen here rather than taken from tabulated sample points")


def log_grid(nu_min: float, nu_max: float, points: int) -> list[float]:
    if not (0 < nu_min < nu_max):
        raise ValueError(f"need 0 < nu_min < nu_max, got {nu_min}, {nu_max}")
    if points < 2:
        raise ValueError("need at least 2 grid points")
    return [float(v) for v in np.geomspace(nu_min, nu_max, points)]


@dataclass(frozen=True)
class SweepSpec:
    sign: Sign
    nu_grid: tuple[float, ...]
    omega: float = 1.0
    methods: frozenset = frozenset({"exact", "asympt"})
    output_path: str | None = None
    asymptote: str = "auto"
    mc_chains: int = 64
    mc_length: float | None = None
    mc_step: float = 1e-3
    seed: int = 12345

    def __post_init__(self):
        if self.sign is Sign.ZERO:
            raise ValueError("sweeps need lambda != 0")
        grid = tuple(float(v) for v in self.nu_grid)
        object.__setattr__(self, "nu_grid", grid)
        object.__setattr__(self, "methods", frozenset(self.methods))
        if any(not (v > 0 and math.isfinite(v)) for v in grid):
            raise ValueError("nu grid must be positive and finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("nu grid must be strictly increasing")
        unknown = self.methods - METHODS
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.asymptote not in ("auto", "small", "large"):
            raise ValueError("asymptote must be auto, small or large")
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass
class SweepRow:
    nu: float
    exact: float | None = None
    asympt: float | None = None
    mc: float | None = None
    mc_std_error: float | None = None
    error: str | None = None

    @property
    def rel_err(self) -> float | None:
        if self.exact is None or self.asympt is None:
            return None
        return abs(self.exact - self.asympt) / abs(self.exact)

    def values(self) -> tuple:
        return (self.nu, self.exact, self.asympt, self.mc, self.mc_std_error, self.rel_err)


@dataclass
class SweepTable:
    sign: Sign
    rows: list[SweepRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def _sweep_point(args) -> SweepRow:
    spec, cfg, c, index = args
    nu = spec.nu_grid[index]
    row = SweepRow(nu)
    p = point_from_nu(spec.omega, spec.sign, nu)
    problems = []
    if "exact" in spec.methods:
        try:
            lo, hi = cfg.nu_exact_range
            if not lo <= nu <= hi:
                raise ValueError(f"nu={nu:g} outside exact range [{lo:g}, {hi:g}]")
            row.exact = normalized_gamma(spec.sign, nu, cfg.quad)[0]
        except Exception as exc:  # recorded in-row, the sweep goes on
            problems.append(f"exact: {exc}")
    if "asympt" in spec.methods:
        try:
            row.asympt = gamma_asympt(p, c, which=spec.asymptote).gamma_over_omega
        except Exception as exc:
            problems.append(f"asympt: {exc}")
    if "mc" in spec.methods:
        try:
            res = estimate_gamma_mc(McConfig(p, step_max=spec.mc_step, length=spec.mc_length,
                                             chains=spec.mc_chains, seed=spec.seed + index))
            row.mc = res.gamma_hat / p.omega
            row.mc_std_error = res.std_error / p.omega
        except Exception as exc:
            problems.append(f"mc: {exc}")
    row.error = "; ".join(problems) or None
    return row


def run_sweep(spec: SweepSpec, cfg: ExactConfig | None = None,
              constants: AsymptoticConstants | None = None, parallelism: int = 1) -> SweepTable:
    """gamma/omega by each requested method on the grid, in grid order."""
    cfg = cfg or ExactConfig()
    c = (constants or default_constants()).c_small_nu
    jobs = [(spec, cfg, c, i) for i in range(len(spec.nu_grid))]
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    meta = {
        "sign": spec.sign.name.lower(),
        "omega": spec.omega,
        "methods": sorted(spec.methods),
        "asymptote": spec.asymptote,
        "failures": [{"nu": r.nu, "message": r.error} for r in rows if r.error],
    }
    return SweepTable(spec.sign, rows, meta)


def _fmt(v) -> str:
    return "" if v is None else format(v, ".12g")


def _num(v):
    return None if v is None else float(format(v, ".12g"))


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row.values()])
    return buf.getvalue()


def table_to_json(table: SweepTable) -> str:
    rows = [dict(zip(COLUMNS, (_num(v) for v in row.values()))) for row in table.rows]
    return json.dumps({"columns": list(COLUMNS), "rows": rows, "metadata": table.metadata}, indent=2) + "\n"


def write_table(table: SweepTable, path, fmt: str = "csv") -> None:
    fmt = fmt.lower()
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown table format {fmt!r}")
    text = table_to_csv(table) if fmt == "csv" else table_to_json(table)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write table to {path}: {exc}") from exc


def read_csv_table(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: (float(v) if v != "" else None) for k, v in rec.items()} for rec in csv.DictReader(fh)]


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Claim:
    name: str
    sign: Sign
    nu_range: tuple[float, float]
    threshold: float
    asymptote: str


CLAIMS = (
    Claim("small_nu_pos", Sign.POSITIVE, (1e-4, 1e-3), 0.007, "small"),
    Claim("large_nu_pos", Sign.POSITIVE, (6.0, 100.0), 0.004, "large"),
    Claim("small_nu_neg", Sign.NEGATIVE, (1e-4, 1e-3), 0.008, "small"),
    Claim("large_nu_neg", Sign.NEGATIVE, (40.0, 1e3), 0.007, "large"),
)


@dataclass(frozen=True)
class ValidationRow:
    regime: str
    nu_range: tuple[float, float]
    max_rel_err_observed: float | None
    threshold: float
    worst_nu: float | None = None
    message: str | None = None

    @property
    def status(self) -> str:
        if self.max_rel_err_observed is None:
            return "indeterminate"
        return "pass" if self.max_rel_err_observed <= self.threshold else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "nu_range": list(self.nu_range),
            "max_rel_err_observed": self.max_rel_err_observed,
            "worst_nu": self.worst_nu,
            "threshold": self.threshold,
            "status": self.status,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    note: str = GRID_NOTE

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dict(self) -> dict:
        return {"all_pass": self.all_pass, "rows": [r.as_dict() for r in self.rows], "note": self.note}

    def to_text(self) -> str:
        lines = [f"{'regime':<14} {'nu range':<18} {'max rel err':>12} {'threshold':>10}  status"]
        for r in self.rows:
            err = "n/a" if r.max_rel_err_observed is None else f"{r.max_rel_err_observed:.4%}"
            rng = f"[{r.nu_range[0]:g}, {r.nu_range[1]:g}]"
            lines.append(f"{r.regime:<14} {rng:<18} {err:>12} {r.threshold:>10.2%}  {r.status}")
        return "\n".join(lines) + "\n"


def validate_claim(claim: Claim, cfg: ExactConfig, constants: AsymptoticConstants,
                   tol_scale: float = 1.0, points: int = 8, parallelism: int = 1,
                   grid: Sequence[float] | None = None) -> ValidationRow:
    nus = tuple(grid) if grid is not None else tuple(log_grid(*claim.nu_range, points))
    spec = SweepSpec(claim.sign, nus, methods={"exact", "asympt"}, asymptote=claim.asymptote)
    threshold = claim.threshold * tol_scale
    table = run_sweep(spec, cfg, constants, parallelism)
    bad = [r for r in table.rows if r.error or r.rel_err is None]
    rng = (nus[0], nus[-1])
    if bad:
        return ValidationRow(claim.name, rng, None, threshold, message=bad[0].error)
    errs = [r.rel_err for r in table.rows]
    k = int(np.argmax(errs))
    return ValidationRow(claim.name, rng, float(errs[k]), threshold, worst_nu=table.rows[k].nu)


def validate_regime_thresholds(cfg: ExactConfig | None = None,
                              constants: AsymptoticConstants | None = None,
                              tol_scale: float = 1.0, points: int = 8,
                              parallelism: int = 1) -> ValidationReport:
    """Check the four regime-accuracy claims on their default grids."""
    cfg = cfg or ExactConfig()
    constants = constants or default_constants()
    rows = tuple(validate_claim(cl, cfg, constants, tol_scale, points, parallelism) for cl in CLAIMS)
    return ValidationReport(rows)
