"""Command-line front door.

Subcommands: simulate, aggregate, moments, estimate, gph, test-asymptotic,
test-bootstrap, test-linear, mc-table.  Flags override config-file values.
Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4
insufficient or unusable data.
"""

import argparse
import sys

import numpy as np

from .aggregate import LinearGrowth, PowerLaw, build_panel, resolve_horizon
from .config import RunConfig, load_config
from .errors import ConfigError, DataError, DurationPoolExhausted, NumericalError
from .estimate import estimate_params
from .fgn import GammaSpec
from .inference import (
    McExperiment,
    estimate_gph,
    resolve_workers,
    run_mc_experiment,
    test_asymptotic,
    test_bootstrap,
    test_linear_simulated,
)
from .io import (
    _fmt,
    provenance_lines,
    read_returns,
    read_series,
    write_report,
    write_series,
    write_table,
)
from .moments import ModelParams, compute_h, moment_table
from .simulate import PathConfig, simulate_path

_OVERRIDES = ("seed", "out", "threads", "alpha", "kappa", "theta", "reps",
              "bootstrap_reps", "t_days")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", "-o", default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--alpha", type=float, default=None)
    common.add_argument("--kappa", type=float, default=None)
    common.add_argument("--theta", type=float, default=None)
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--bootstrap-reps", type=int, default=None, dest="bootstrap_reps")
    common.add_argument("--t-days", type=int, default=None, dest="t_days")

    parser = argparse.ArgumentParser(prog="purejump", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="write one simulated daily path as CSV")

    agg = sub.add_parser("aggregate", parents=[common], help="overlapping monthly windows CSV")
    agg.add_argument("--input", required=True)
    agg.add_argument("--h-tilde", type=int, default=None, dest="h_tilde")

    mom = sub.add_parser("moments", parents=[common], help="population moment table CSV")
    mom.add_argument("--h-max", type=int, default=None, dest="h_max")

    est = sub.add_parser("estimate", parents=[common], help="method-of-moments parameter fit")
    est.add_argument("--input", required=True)

    gph = sub.add_parser("gph", parents=[common], help="log-periodogram memory estimate")
    gph.add_argument("--input", required=True)
    gph.add_argument("--bandwidth-exponent", type=float, default=None, dest="bandwidth_exponent")

    for name in ("test-asymptotic", "test-bootstrap", "test-linear"):
        tp = sub.add_parser(name, parents=[common], help=f"{name.replace('-', ' ')} report")
        tp.add_argument("--input", required=True)

    mc = sub.add_parser("mc-table", parents=[common], help="Monte Carlo sampling-grid CSV")
    mc.add_argument("--t-tilde", required=True, dest="t_tilde",
                    help="comma-separated grid of month counts")
    mc.add_argument("--kappa-grid", default="", dest="kappa_grid")
    mc.add_argument("--theta-grid", default="", dest="theta_grid")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    for name in _OVERRIDES:
        value = getattr(args, name, None)
        if value is not None and name != "out":
            setattr(cfg, name, value)
    return cfg.validate()


def _model_params(cfg: RunConfig) -> ModelParams:
    return ModelParams(cfg.mu, cfg.lam, cfg.sigma_e, GammaSpec(cfg.c, cfg.d))


def _path_config(cfg: RunConfig) -> PathConfig:
    return PathConfig(cfg.t_days, cfg.steps_per_day, cfg.days_per_month,
                      cfg.seed, cfg.duration_pool)


def _require(value, what: str):
    if value is None:
        raise ConfigError(f"{what} is required for this command")
    return value


def _emit_report(args, cfg, items: dict) -> None:
    header = provenance_lines(cfg.as_dict(), cfg.seed)
    text = write_report(args.out, header, items)
    sys.stdout.write(text)


def _test_report_items(report) -> dict:
    items = {
        "framework": report.framework,
        "method": report.method,
        "statistic": report.statistic,
        "normalization": report.normalization,
        "critical_value": report.critical_value,
        "p_value": "" if report.p_value is None else report.p_value,
        "reject": report.reject,
        "alpha": report.alpha,
        "t_tilde": report.t_tilde,
        "h_tilde": report.h_tilde,
        "h": report.h,
    }
    p = report.params_used
    if p is not None:
        items.update(null_mu=p.mu, null_lambda=p.lam, null_sigma_e=p.sigma_e, null_c=p.c)
    return items


def dispatch(args) -> int:
    cfg = _resolve(args)
    command = args.command

    if command == "simulate":
        _require(cfg.seed, "--seed")
        out = _require(args.out, "--out")
        series = simulate_path(_model_params(cfg), _path_config(cfg))
        write_series(out, series, provenance_lines(cfg.as_dict(), cfg.seed))
        return 0

    if command == "aggregate":
        series = read_series(args.input)
        m = cfg.days_per_month
        t_tilde = len(series) // m
        h_tilde = args.h_tilde or resolve_horizon(PowerLaw(cfg.kappa), t_tilde)
        h = compute_h(cfg.c)
        panel = build_panel(series, m, h_tilde, h)
        out = _require(args.out, "--out")
        idx = range(panel.h_tilde, panel.t_tilde - panel.h_tilde + 1)
        rows = (
            (t, panel.forward_r[t], panel.backward_rv[t], panel.modified_r[t]) for t in idx
        )
        write_table(out, provenance_lines(cfg.as_dict(), cfg.seed),
                    ["t_tilde", "forward_return", "backward_rv", "modified_forward_return"],
                    rows)
        return 0

    if command == "moments":
        p = _model_params(cfg)
        table = moment_table(p, cfg.days_per_month, h_max=args.h_max)
        out = _require(args.out, "--out")
        header = provenance_lines(cfg.as_dict(), cfg.seed) + [
            f"# var_r={_fmt(table.var_r)}",
            f"# var_r2={_fmt(table.var_r2)}",
            f"# a1={_fmt(table.a1)}",
            f"# a2={_fmt(table.a2)}",
            f"# s2={_fmt(table.s2)}",
            f"# h={table.h}",
        ]
        rows = (
            (lag, table.cov_r[lag - 1], table.cov_r2[lag - 1], table.cov_r_r2[lag - 1])
            for lag in range(1, len(table.cov_r) + 1)
        )
        write_table(out, header, ["lag", "cov_r", "cov_r2", "cov_r_r2"], rows)
        return 0

    if command == "estimate":
        series = read_series(args.input)
        report = estimate_params(series)
        _emit_report(args, cfg, {
            "mu_hat": report.mu_hat,
            "lambda_hat": report.lambda_hat,
            "sigma_e_hat": report.sigma_e_hat,
            "c_hat": report.c_hat,
            "d_hat": report.d_hat,
            "sigma_e_flagged": report.sigma_e_flagged,
            "converged": report.converged,
            "d_boundary": report.d_boundary or "",
            "iterations": report.iterations,
            "residual_lag1": report.residuals[0],
            "residual_lag2": report.residuals[1],
        })
        return 0

    if command == "gph":
        exponent = args.bandwidth_exponent or cfg.bandwidth_exponent
        returns = read_returns(args.input)
        d_hat = estimate_gph(returns, exponent)
        _emit_report(args, cfg, {"d_gph": d_hat, "bandwidth_exponent": exponent,
                                 "n": len(returns)})
        return 0

    if command == "test-asymptotic":
        series = read_series(args.input)
        report = test_asymptotic(series, cfg.days_per_month, cfg.kappa, cfg.alpha)
        _emit_report(args, cfg, _test_report_items(report))
        return 0

    if command == "test-bootstrap":
        series = read_series(args.input)
        report = test_bootstrap(series, cfg.days_per_month, cfg.kappa, cfg.bootstrap_reps,
                                cfg.alpha, seed=cfg.seed or 0,
                                workers=resolve_workers(cfg.threads or None))
        _emit_report(args, cfg, _test_report_items(report))
        return 0

    if command == "test-linear":
        series = read_series(args.input)
        report = test_linear_simulated(series, cfg.days_per_month, cfg.theta,
                                       cfg.bootstrap_reps, cfg.alpha, seed=cfg.seed or 0,
                                       workers=resolve_workers(cfg.threads or None))
        _emit_report(args, cfg, _test_report_items(report))
        return 0

    if command == "mc-table":
        _require(cfg.seed, "--seed")
        out = _require(args.out, "--out")
        try:
            t_grid = [int(v) for v in args.t_tilde.split(",") if v]
            kappas = [float(v) for v in args.kappa_grid.split(",") if v]
            thetas = [float(v) for v in args.theta_grid.split(",") if v]
        except ValueError as exc:
            raise ConfigError(f"bad grid value: {exc}") from None
        schemes = [PowerLaw(k) for k in kappas] + [LinearGrowth(t) for t in thetas]
        if not schemes or not t_grid:
            raise ConfigError("mc-table needs --t-tilde and at least one of "
                              "--kappa-grid/--theta-grid")
        exp = McExperiment(_model_params(cfg), cfg.days_per_month, t_grid, schemes,
                           cfg.reps, cfg.seed, cfg.alpha,
                           workers=resolve_workers(cfg.threads or None))
        cells = run_mc_experiment(exp)
        rows = (
            (c.framework, c.param, c.t_tilde, c.reps, c.mean_rho, c.var_rho,
             "" if np.isnan(c.rejection_rate) else c.rejection_rate, c.slope)
            for c in cells
        )
        write_table(out, provenance_lines(cfg.as_dict(), cfg.seed),
                    ["framework", "param", "t_tilde", "reps", "mean_rho", "var_rho",
                     "rejection_rate", "slope_cell_marker"], rows)
        return 0

    raise ConfigError(f"unknown command {command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, DurationPoolExhausted) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
