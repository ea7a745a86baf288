"""Command-line front end: `mginf eval|simulate|verify`.

Emits plot-ready CSV (17 significant digits, '.' decimal separator, LF line
endings) and pass/fail verification reports.  Exit codes: 0 success / all
checks pass, 1 verification failure, 2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import closed_form as cf
from .errors import DegenerateDistribution, MginfError
from .kernel import build_kernel, riccati_service_cdf
from .params import (
    BetaSpec,
    QueueParams,
    ValidatedBeta,
    load_beta_table,
    validate_beta,
    validate_queue_params,
)
from .simulate import empirical_cdf, kernel_service_sampler, ks_distance, run_cycles, cycle_summary
from .transforms import GridSpec, busy_cycle_cdf_series, busy_period_cdf_series, default_grid
from .verify import series_curves, verify_point

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INVALID = 2
EXIT_IO = 3


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class RunConfig:
    params: QueueParams
    vbeta: ValidatedBeta
    beta: float | None  # constant value, None for tabulated
    t_max: float
    step: float
    cycles: int
    seed: int
    tol: float
    out: Path | None


def _build_config(args) -> RunConfig:
    params = validate_queue_params(args.lam, args.rho)
    if (args.beta is None) == (args.beta_file is None):
        raise MginfError("exactly one of --beta / --beta-file is required")
    if args.beta is not None:
        spec = BetaSpec(constant=args.beta)
    else:
        spec = load_beta_table(args.beta_file)
    grid = default_grid(params)
    t_max = args.t_max if args.t_max is not None else grid.t_max
    if t_max <= 0:
        raise MginfError(f"--t-max must be > 0, got {t_max}")
    step = args.step if args.step is not None else grid.step
    if step <= 0:
        raise MginfError(f"--step must be > 0, got {step}")
    vbeta = validate_beta(params, spec, t_max)
    return RunConfig(
        params=params,
        vbeta=vbeta,
        beta=spec.constant,
        t_max=t_max,
        step=step,
        cycles=args.cycles,
        seed=args.seed,
        tol=args.tol,
        out=Path(args.out) if args.out else None,
    )


def _open_out(config: RunConfig):
    if config.out is None:
        return sys.stdout
    return open(config.out, "w", newline="\n")


def cmd_eval(config: RunConfig) -> int:
    params = config.params
    n = int(round(config.t_max / config.step)) + 1
    ts = np.arange(n) * config.step
    if config.beta is not None:
        beta = config.beta
        g = cf.service_cdf(params, beta, ts)
        b = cf.busy_period_cdf(params, beta, ts)
        z = cf.busy_cycle_cdf(params, beta, ts)
        p00 = cf.empty_probability(params, beta, ts)
        try:
            ind = np.broadcast_to(cf.monotony_indicator(params, beta, ts), ts.shape)
        except DegenerateDistribution:
            ind = np.full_like(ts, beta)
    else:
        ctx = build_kernel(params, config.vbeta)
        g = riccati_service_cdf(ctx, ts)
        grid = GridSpec(step=min(default_grid(params).step, config.step),
                        t_max=config.t_max)
        b_grid = busy_period_cdf_series(ctx, grid, config.tol)
        z_grid = busy_cycle_cdf_series(ctx, grid, config.tol)
        b = np.interp(ts, b_grid.times, b_grid.values)
        z = np.interp(ts, z_grid.times, z_grid.values)
        # p00 from Eq-1-style quadrature of the survival of G
        fine = np.linspace(0.0, config.t_max, 4 * n + 1)
        surv = 1.0 - riccati_service_cdf(ctx, fine)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (surv[1:] + surv[:-1]) * np.diff(fine))])
        p00 = np.exp(-params.lam * np.interp(ts, fine, cum))
        ind = config.vbeta.spec.value(ts)
    p10 = p00 * g
    env = cf.envelope_bounds(params, ts)
    out = _open_out(config)
    try:
        out.write("t,G,B,Z,p00,p10,indicator,bp_floor,cycle_floor,cycle_ceiling\n")
        for i in range(n):
            row = (ts[i], g[i], b[i], z[i], p00[i], p10[i], ind[i],
                   env.bp_floor[i], env.cycle_floor[i], env.cycle_ceiling[i])
            out.write(",".join(_fmt(v) for v in row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    params = config.params
    if config.cycles < 1:
        raise MginfError("--cycles must be >= 1")
    if config.beta is not None:
        samples = run_cycles(params, config.beta, config.cycles, config.seed)
        if params.lam + config.beta <= 0:
            b_cdf = lambda t: np.ones_like(np.asarray(t, dtype=float))
            z_cdf = lambda t: -np.expm1(-params.lam * np.asarray(t, dtype=float))
        else:
            b_cdf = lambda t: cf.busy_period_cdf(params, config.beta, t)
            z_cdf = lambda t: cf.busy_cycle_cdf(params, config.beta, t)
    else:
        ctx = build_kernel(params, config.vbeta)
        samples = run_cycles(params, None, config.cycles, config.seed,
                             service_sampler=kernel_service_sampler(ctx))
        b_grid, z_grid = series_curves(params, config.vbeta)
        b_cdf = lambda t: np.interp(t, b_grid.times, b_grid.values)
        z_cdf = lambda t: np.interp(t, z_grid.times, z_grid.values)
    out = _open_out(config)
    try:
        out.write("busy,idle,cycle\n")
        for i in range(samples.n):
            out.write(f"{_fmt(samples.busy[i])},{_fmt(samples.idle[i])},{_fmt(samples.cycle[i])}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    summ = cycle_summary(samples)
    ks_busy = ks_distance(empirical_cdf(samples.busy), b_cdf)
    ks_cycle = ks_distance(empirical_cdf(samples.cycle), z_cdf)
    ks_idle = ks_distance(empirical_cdf(samples.idle),
                          lambda t: -np.expm1(-params.lam * np.asarray(t, dtype=float)))
    print(f"cycles          {samples.n}")
    print(f"seed            {samples.seed}")
    print(f"mean_busy       {_fmt(summ.mean_busy)} (stderr {_fmt(summ.stderr_busy)})")
    print(f"mean_idle       {_fmt(summ.mean_idle)} (stderr {_fmt(summ.stderr_idle)})")
    print(f"mean_cycle      {_fmt(summ.mean_cycle)} (stderr {_fmt(summ.stderr_cycle)})")
    print(f"ks_busy         {_fmt(ks_busy)}")
    print(f"ks_cycle        {_fmt(ks_cycle)}")
    print(f"ks_idle         {_fmt(ks_idle)}")
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    results = verify_point(config.params, config.vbeta, config.cycles, config.seed)
    failed = False
    for r in results:
        print(f"{r.status:<4} {r.name}: {r.detail}")
        if r.status == "FAIL":
            failed = True
    return EXIT_VERIFY_FAIL if failed else EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="Poisson arrival rate")
    p.add_argument("--rho", type=float, required=True, help="traffic intensity")
    p.add_argument("--beta", type=float, default=None,
                   help="constant monotony indicator beta")
    p.add_argument("--beta-file", default=None,
                   help="CSV table `t,beta` with header row, piecewise-linear")
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--cycles", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="series truncation tolerance")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mginf",
        description="M|G|inf busy period and busy cycle distributions for the "
                    "Riccati service family",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("eval", "evaluate analytic curves to CSV"),
                        ("simulate", "run regenerative Monte Carlo"),
                        ("verify", "run the cross-validation suite")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
    args = parser.parse_args(argv)
    try:
        config = _build_config(args)
        if args.command == "eval":
            return cmd_eval(config)
        if args.command == "simulate":
            return cmd_simulate(config)
        return cmd_verify(config)
    except MginfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
