"""Command-line front end: wnlyap {gamma, sweep, validate, constant-c, mc}.

Results go to stdout (JSON, or CSV for tables); diagnostics go to stderr.
Exit codes: 0 ok, 1 validation claim failed, 2 usage error, 3 compute failure.

A ``--config`` file holds flat ``key=value`` lines using the long flag names
(``nu-min=1e-4`` or ``nu_min=1e-4``).  Its entries are inserted ahead of the
command-line flags, so explicit flags win.
"""

from __future__ import annotations

import argparse
from contextlib import contextmanager
import json
import math
import os
import sys

from .asympt import default_constants, gamma_asympt, gamma_uniform
from .exact import ExactConfig, gamma_exact
from .mc import McConfig, McError, estimate_gamma_mc
from .model import GammaEstimate, Method, RegimeError, Sign, make_spectral_point, point_from_nu
from .quad import QuadratureError, QuadSpec
from .report import (SweepSpec, log_grid, run_sweep, table_to_csv, table_to_json,
                     validate_regime_thresholds, write_table)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return v


def finite_float(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return v


def sign_arg(text):
    try:
        return Sign.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file with defaults for the flags")
    common.add_argument("--parallelism", type=positive_int, default=os.cpu_count() or 1,
                        help="maximum worker count (default: available cores)")

    mc_opts = argparse.ArgumentParser(add_help=False)
    mc_opts.add_argument("--chains", type=int, default=64)
    mc_opts.add_argument("--length", type=positive_float, default=None,
                         help="chain length in x (default 400/gamma_guess)")
    mc_opts.add_argument("--step", type=positive_float, default=1e-3,
                         help="step factor; the step is step*min(1/omega, omega^2/sigma^2)")
    mc_opts.add_argument("--seed", type=int, default=12345)

    ap = argparse.ArgumentParser(prog="wnlyap", description="Lyapunov exponent of the white-noise Schrodinger operator")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma", parents=[common, mc_opts], help="gamma at one spectral point")
    g.add_argument("--lambda", dest="lam", type=finite_float)
    g.add_argument("--omega", type=finite_float)
    g.add_argument("--sign", type=sign_arg)
    g.add_argument("--sigma", type=positive_float)
    g.add_argument("--nu", type=positive_float)
    g.add_argument("--method", choices=["exact", "asympt", "mc", "uniform"], default="uniform")
    g.add_argument("--tol", type=positive_float, default=1e-10, help="quadrature relative tolerance")

    s = sub.add_parser("sweep", parents=[common, mc_opts], help="gamma/omega on a log-spaced nu grid")
    s.add_argument("--sign", type=sign_arg, required=True)
    s.add_argument("--nu-min", type=positive_float, required=True)
    s.add_argument("--nu-max", type=positive_float, required=True)
    s.add_argument("--points", type=positive_int, default=8)
    s.add_argument("--methods", default="exact,asympt", help="comma list from exact, asympt, mc")
    s.add_argument("--asymptote", choices=["auto", "small", "large"], default="auto")
    s.add_argument("--omega", type=positive_float, default=1.0)
    s.add_argument("--output", help="output file (default: stdout)")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--tol", type=positive_float, default=1e-10)

    v = sub.add_parser("validate", parents=[common], help="check the four regime-accuracy claims")
    v.add_argument("--tol-scale", type=positive_float, default=1.0)
    v.add_argument("--points", type=positive_int, default=8)
    v.add_argument("--format", choices=["json", "text"], default="json")
    v.add_argument("--tol", type=positive_float, default=1e-10)

    c = sub.add_parser("constant-c", parents=[common], help="the small-nu constant c")
    c.add_argument("--tol", type=positive_float, default=1e-10)
    c.add_argument("--format", choices=["json", "text"], default="json")

    m = sub.add_parser("mc", parents=[common, mc_opts], help="Monte Carlo estimate of gamma")
    m.add_argument("--lambda", dest="lam", type=finite_float, required=True)
    m.add_argument("--sigma", type=positive_float, required=True)
    m.add_argument("--z0", type=finite_float, default=0.0)
    return ap


def read_config(path: str) -> list[tuple[str, str]]:
    try:
        text = open(path).read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    items = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (t.strip() for t in line.split("=", 1))
        if not key or key == "config":
            raise UsageError(f"{path}:{n}: bad key {key!r}")
        items.append((key.replace("_", "-"), val))
    return items


def expand_config(argv: list[str]) -> list[str]:
    """Insert config-file entries as flags right after the subcommand."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    tokens = []
    for key, val in read_config(known.config):
        tokens += [f"--{key}", val]
    # the subcommand is the first token that is not an option
    for i, tok in enumerate(argv):
        if not tok.startswith("-"):
            return argv[: i + 1] + tokens + argv[i + 1 :]
    return argv


@contextmanager
def usage():
    """Turn constructor validation errors into usage errors."""
    try:
        yield
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, allow_nan=False) + "\n")
    sys.stdout.flush()


def spectral_point_from_args(a):
    by_lambda = a.lam is not None
    by_omega = a.omega is not None or a.sign is not None
    if by_lambda == by_omega:
        raise UsageError("give exactly one of --lambda or (--omega and --sign)")
    if by_omega and (a.omega is None or a.sign is None):
        raise UsageError("--omega and --sign must be given together")
    if (a.sigma is None) == (a.nu is None):
        raise UsageError("give exactly one of --sigma or --nu")
    if by_lambda:
        omega = math.sqrt(abs(a.lam))
        sign = Sign.POSITIVE if a.lam > 0 else Sign.NEGATIVE if a.lam < 0 else Sign.ZERO
    else:
        omega, sign = a.omega, a.sign
        if omega < 0:
            raise UsageError("--omega must be non-negative")
        if (omega == 0) != (sign is Sign.ZERO):
            raise UsageError("--omega 0 goes with --sign zero and vice versa")
    if a.sigma is None and sign is Sign.ZERO:
        raise UsageError("lambda = 0 has nu = 0; give --sigma instead of --nu")
    with usage():
        if a.sigma is not None:
            return make_spectral_point(sign.value * omega * omega, a.sigma)
        return point_from_nu(omega, sign, a.nu)


def cmd_gamma(a) -> int:
    p = spectral_point_from_args(a)
    cfg = ExactConfig(quad=QuadSpec(rel_tol=a.tol))
    if a.method == "exact":
        lo, hi = cfg.nu_exact_range
        if p.sign is Sign.ZERO or not lo <= p.nu <= hi:
            raise UsageError(f"exact quadrature needs lambda != 0 and nu in [{lo:g}, {hi:g}]")
    if a.method == "mc":
        with usage():
            mcfg = McConfig(p, step_max=a.step, length=a.length, chains=a.chains, seed=a.seed,
                            workers=a.parallelism)
        res = estimate_gamma_mc(mcfg)
        est = GammaEstimate(res.gamma_hat, Method.MONTE_CARLO, res.std_error, p.omega, nu=p.nu)
    elif a.method == "exact":
        est = gamma_exact(p, cfg)
    else:
        c = default_constants(min(a.tol, 1e-6)).c_small_nu
        est = gamma_asympt(p, c) if a.method == "asympt" else gamma_uniform(p, cfg, c)
    emit(est.as_dict())
    return EXIT_OK


def cmd_sweep(a) -> int:
    if a.nu_min >= a.nu_max:
        raise UsageError(f"--nu-min ({a.nu_min:g}) must be below --nu-max ({a.nu_max:g})")
    if a.points < 2:
        raise UsageError("--points must be at least 2")
    if a.sign is Sign.ZERO:
        raise UsageError("sweeps need --sign pos or neg")
    methods = {m.strip() for m in a.methods.split(",") if m.strip()}
    if "mc" in methods and a.chains < 2:
        raise UsageError("--chains must be at least 2")
    with usage():
        spec = SweepSpec(a.sign, tuple(log_grid(a.nu_min, a.nu_max, a.points)), a.omega, methods,
                         a.output, a.asymptote, a.chains, a.length, a.step, a.seed)
    cfg = ExactConfig(quad=QuadSpec(rel_tol=a.tol))
    table = run_sweep(spec, cfg, default_constants(), a.parallelism)
    for f in table.metadata["failures"]:
        print(f"warning: nu={f['nu']:g}: {f['message']}", file=sys.stderr)
    if a.output:
        write_table(table, a.output, a.format)
    else:
        sys.stdout.write(table_to_csv(table) if a.format == "csv" else table_to_json(table))
    return EXIT_OK


def cmd_validate(a) -> int:
    cfg = ExactConfig(quad=QuadSpec(rel_tol=a.tol))
    rep = validate_regime_thresholds(cfg, default_constants(), a.tol_scale, a.points, a.parallelism)
    if a.format == "json":
        emit(rep.as_dict())
    else:
        sys.stdout.write(rep.to_text())
    if rep.all_pass:
        return EXIT_OK
    if any(r.status == "fail" for r in rep.rows):
        return EXIT_FAIL
    return EXIT_COMPUTE


def cmd_constant_c(a) -> int:
    k = default_constants(a.tol)
    c, c2 = k.c_small_nu, k.c_quoted_check
    if a.format == "json":
        emit({"c": c, "two_third_root_c": c2, "tol": a.tol})
    else:
        sys.stdout.write(f"c = {c:.15g}\n2^(1/3) c = {c2:.15g}\n")
    return EXIT_OK


def cmd_mc(a) -> int:
    with usage():
        p = make_spectral_point(a.lam, a.sigma)
        cfg = McConfig(p, step_max=a.step, length=a.length, chains=a.chains, seed=a.seed,
                       z0=a.z0, workers=a.parallelism)
    res = estimate_gamma_mc(cfg)
    out = res.as_dict()
    out.update(nu=p.nu, omega=p.omega, gamma_over_omega=res.gamma_hat / p.omega,
               seed=a.seed, chains=a.chains)
    emit(out)
    return EXIT_OK


COMMANDS = {"gamma": cmd_gamma, "sweep": cmd_sweep, "validate": cmd_validate,
            "constant-c": cmd_constant_c, "mc": cmd_mc}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = expand_config(argv)
    except UsageError as exc:
        print(f"wnlyap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(a, "chains", 2) < 2:
        print("wnlyap: error: --chains must be at least 2 to estimate a standard error", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[a.command](a)
    except UsageError as exc:
        print(f"wnlyap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, McError, RegimeError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"wnlyap: compute failure: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"wnlyap: I/O failure: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
