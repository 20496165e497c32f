"""Hypothesis tests for long-run return predictability plus the MC harness.

Two frameworks:

* power law (``H = floor(T^kappa)``): the rescaled statistic
  ``sqrt(T^{1-kappa}) * rho`` is asymptotically normal under the short-memory
  null; tested either against the closed-form normal critical value
  (``test_asymptotic``, using the modified correlation) or against the
  empirical 95th percentile of parametric-bootstrap replicates
  (``test_bootstrap``, using the plain correlation);
* linear growth (``H = floor(theta T)``): the un-rescaled correlation against
  simulated null critical values (``test_linear_simulated``); correctly sized
  but inconsistent, since the statistic converges in distribution under both
  hypotheses.

``run_mc_experiment`` regenerates the sampling-distribution tables: per-cell
mean and variance of the correlation, rejection rates, and the log-variance
versus log-sample-size regression slope per scheme.
"""

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as sstats

from .aggregate import LinearGrowth, PowerLaw, build_panel, resolve_horizon, rho_hat, rho_tilde
from .errors import TooFewOrdinates
from .estimate import estimate_params
from .fgn import GammaSpec
from .moments import ModelParams, MomentTable, compute_h, moment_table
from .simulate import DailySeries, PathConfig, simulate_path

THREADS_ENV = "PUREJUMP_THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, then environment, then CPU count."""
    if workers is not None and workers > 0:
        return workers
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _parallel_map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


@dataclass(frozen=True)
class TestReport:
    """Outcome of one predictability test; reject iff statistic > critical value."""

    framework: str
    method: str
    statistic: float
    normalization: float
    critical_value: float
    reject: bool
    p_value: float | None
    alpha: float
    t_tilde: int
    h_tilde: int
    h: int
    params_used: ModelParams | None = None

    def __post_init__(self):
        if self.reject != (self.statistic > self.critical_value):
            raise ValueError("decision must equal statistic > critical_value")


def _series_statistic(returns, m, scheme, h, use_modified):
    t_tilde = len(returns) // m
    h_tilde = resolve_horizon(scheme, t_tilde)
    panel = build_panel(returns, m, h_tilde, h if use_modified else 0)
    rho = rho_tilde(panel) if use_modified else rho_hat(panel)
    if isinstance(scheme, PowerLaw):
        norm = math.sqrt(t_tilde ** (1.0 - scheme.kappa))
    else:
        norm = 1.0
    return norm * rho, norm, t_tilde, h_tilde


def _null_params(series: DailySeries, params: ModelParams | None) -> ModelParams:
    if params is not None:
        return params
    return estimate_params(series).params(force_d=0.0)


def test_asymptotic(
    series: DailySeries,
    m: int,
    kappa: float,
    alpha: float = 0.05,
    params: ModelParams | None = None,
    ingredients: MomentTable | None = None,
) -> TestReport:
    """Normal-theory test of no long-run predictability at level ``alpha``.

    Statistic ``sqrt(T^{1-kappa})`` times the modified correlation; critical
    value ``z_{1-alpha} * sqrt(S^2 / (A1 A2))`` with the ingredients evaluated
    under the short-memory null (supplied ``params``, or the model estimates
    with the memory parameter forced to zero).
    """
    if not 0.0 < kappa < 1.0 / 3.0:
        warnings.warn(
            f"kappa={kappa} outside (0, 1/3); the normal limit is not established there",
            RuntimeWarning,
            stacklevel=2,
        )
    p0 = _null_params(series, params)
    h = compute_h(p0.c)
    stat, norm, t_tilde, h_tilde = _series_statistic(
        series.returns, m, PowerLaw(kappa), h, use_modified=True
    )
    table = ingredients if ingredients is not None else moment_table(p0, m)
    ratio = table.variance_ratio
    scale = math.sqrt(ratio)
    critical = float(sstats.norm.ppf(1.0 - alpha)) * scale
    p_value = float(sstats.norm.sf(stat / scale))
    return TestReport(
        framework="power",
        method="asymptotic",
        statistic=stat,
        normalization=norm,
        critical_value=critical,
        reject=stat > critical,
        p_value=p_value,
        alpha=alpha,
        t_tilde=t_tilde,
        h_tilde=h_tilde,
        h=h,
        params_used=p0,
    )


def _null_statistic_unit(args):
    (mu, lam, sigma_e, c, t_days, m, scheme, h, use_modified, entropy) = args
    p0 = ModelParams(mu, lam, sigma_e, GammaSpec(c, 0.0))
    path = simulate_path(p0, PathConfig(t_days, seed=entropy))
    stat, _, _, _ = _series_statistic(path.returns, m, scheme, h, use_modified)
    return stat


def simulated_null_statistics(
    p0: ModelParams,
    t_days: int,
    m: int,
    scheme,
    B: int,
    seed,
    use_modified: bool = False,
    workers: int = 1,
) -> np.ndarray:
    """``B`` replicates of the test statistic under the fitted null model."""
    h = compute_h(p0.c)
    base = seed if isinstance(seed, tuple) else (seed,)
    units = [
        (p0.mu, p0.lam, p0.sigma_e, p0.c, t_days, m, scheme, h, use_modified, (*base, b))
        for b in range(B)
    ]
    return np.asarray(_parallel_map(_null_statistic_unit, units, workers))


def _simulated_critical_test(
    series, m, scheme, B, alpha, seed, method, framework, use_modified, workers
):
    if B < 100:
        warnings.warn(f"B={B} bootstrap replicates is below the sensible minimum of 100",
                      RuntimeWarning, stacklevel=3)
    est = estimate_params(series)
    p0 = est.params(force_d=0.0)
    h = compute_h(p0.c)
    stat, norm, t_tilde, h_tilde = _series_statistic(series.returns, m, scheme, h, use_modified)
    t_days = t_tilde * m
    null_stats = simulated_null_statistics(
        p0, t_days, m, scheme, B, seed, use_modified=use_modified, workers=workers
    )
    critical = float(np.quantile(null_stats, 1.0 - alpha))
    p_value = float(np.mean(null_stats >= stat))
    return TestReport(
        framework=framework,
        method=method,
        statistic=stat,
        normalization=norm,
        critical_value=critical,
        reject=stat > critical,
        p_value=p_value,
        alpha=alpha,
        t_tilde=t_tilde,
        h_tilde=h_tilde,
        h=h,
        params_used=p0,
    )


def test_bootstrap(
    series: DailySeries,
    m: int,
    kappa: float,
    B: int = 1000,
    alpha: float = 0.05,
    seed=0,
    use_modified: bool = False,
    workers: int = 1,
) -> TestReport:
    """Parametric bootstrap test under the power-law framework.

    Estimates the model, forces the memory parameter to zero, simulates ``B``
    null paths of the same length, and rejects when the observed rescaled
    correlation exceeds their empirical ``1 - alpha`` quantile.
    """
    return _simulated_critical_test(
        series, m, PowerLaw(kappa), B, alpha, seed, "bootstrap", "power", use_modified, workers
    )


def test_linear_simulated(
    series: DailySeries,
    m: int,
    theta: float,
    B: int = 1000,
    alpha: float = 0.05,
    seed=0,
    workers: int = 1,
) -> TestReport:
    """Linear-growth-framework test with simulated critical values.

    Uses the raw correlation without rescaling; correctly sized but known to
    be inconsistent (its power does not approach one as the sample grows).
    """
    return _simulated_critical_test(
        series, m, LinearGrowth(theta), B, alpha, seed,
        "simulated-critical-linear", "linear", False, workers,
    )


def estimate_gph(returns, bandwidth_exponent: float = 0.5) -> float:
    """Log-periodogram memory estimate with bandwidth ``floor(n^exponent)``.

    Regresses the log periodogram at the first ``m_b`` Fourier frequencies on
    ``-2 log(omega_j)``; the slope estimates the memory parameter.
    """
    x = np.asarray(returns, dtype=float)
    n = len(x)
    if n < 64:
        raise TooFewOrdinates(f"need at least 64 observations, got {n}")
    m_b = int(np.floor(n**bandwidth_exponent))
    if m_b < 4:
        raise TooFewOrdinates(f"bandwidth n^{bandwidth_exponent} gives {m_b} < 4 ordinates")
    spec = np.fft.rfft(x - x.mean())[1 : m_b + 1]
    periodogram = (spec.real**2 + spec.imag**2) / (2.0 * np.pi * n)
    if np.any(periodogram <= 0.0):
        raise TooFewOrdinates("zero periodogram ordinate; series is degenerate")
    omega = 2.0 * np.pi * np.arange(1, m_b + 1) / n
    regressor = -2.0 * np.log(omega)
    xd = regressor - regressor.mean()
    yd = np.log(periodogram) - np.log(periodogram).mean()
    return float(np.dot(xd, yd) / np.dot(xd, xd))


def normality_diagnostic(values) -> dict:
    """Skewness and excess-kurtosis z-tests for departure from normality."""
    skew_stat, skew_p = sstats.skewtest(values)
    kurt_stat, kurt_p = sstats.kurtosistest(values)
    return {
        "skew_z": float(skew_stat),
        "skew_p": float(skew_p),
        "kurtosis_z": float(kurt_stat),
        "kurtosis_p": float(kurt_p),
    }


# --------------------------------------------------------------------------
# Monte Carlo experiment harness
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class McCell:
    framework: str
    param: float
    t_tilde: int
    reps: int
    mean_rho: float
    var_rho: float
    rejection_rate: float
    slope: float


@dataclass
class McExperiment:
    """Grid of sampling-distribution cells for the correlation statistic.

    Every ``(scheme, t_tilde)`` cell runs ``reps`` independent paths with
    seeds mixed from ``(base_seed, cell index, replication index)``; the
    rejection rate applies the asymptotic rule with population null
    ingredients for power-law schemes (NaN for linear growth).
    """

    params: ModelParams
    m: int
    t_tilde_grid: list
    schemes: list
    reps: int
    base_seed: int
    alpha: float = 0.05
    workers: int | None = None


def _mc_unit(args):
    (mu, lam, sigma_e, c, d, m, t_tilde, kind, param, h, entropy) = args
    from .errors import PurejumpError

    try:
        p = ModelParams(mu, lam, sigma_e, GammaSpec(c, d))
        scheme = PowerLaw(param) if kind == "power" else LinearGrowth(param)
        path = simulate_path(p, PathConfig(t_tilde * m, seed=entropy))
        h_tilde = resolve_horizon(scheme, t_tilde)
        panel = build_panel(path.returns, m, h_tilde, h)
        rho = rho_hat(panel)
        norm = math.sqrt(t_tilde ** (1.0 - param)) if kind == "power" else 1.0
        stat_mod = norm * rho_tilde(panel)
        return rho, stat_mod
    except PurejumpError:
        # flagged by the shortfall of completed replications in the cell row
        return None


def run_mc_experiment(exp: McExperiment) -> list[McCell]:
    """Run every cell; returns per-cell summaries with per-scheme slopes."""
    workers = resolve_workers(exp.workers)
    p = exp.params
    null_table = moment_table(
        ModelParams(p.mu, p.lam, p.sigma_e, GammaSpec(p.c, 0.0)), exp.m
    )
    critical = float(sstats.norm.ppf(1.0 - exp.alpha)) * math.sqrt(null_table.variance_ratio)
    h = null_table.h

    units = []
    cell_meta = []
    for s_idx, scheme in enumerate(exp.schemes):
        kind = "power" if isinstance(scheme, PowerLaw) else "linear"
        param = scheme.kappa if kind == "power" else scheme.theta
        for t_idx, t_tilde in enumerate(exp.t_tilde_grid):
            cell_idx = len(cell_meta)
            cell_meta.append((kind, param, int(t_tilde)))
            for rep in range(exp.reps):
                units.append(
                    (p.mu, p.lam, p.sigma_e, p.c, p.d, exp.m, int(t_tilde), kind, param, h,
                     (exp.base_seed, cell_idx, rep))
                )
    results = _parallel_map(_mc_unit, units, workers)

    cells = []
    for cell_idx, (kind, param, t_tilde) in enumerate(cell_meta):
        block = [b for b in results[cell_idx * exp.reps : (cell_idx + 1) * exp.reps]
                 if b is not None]
        if len(block) >= 2:
            rhos = np.array([b[0] for b in block])
            mods = np.array([b[1] for b in block])
            mean_rho, var_rho = float(rhos.mean()), float(rhos.var(ddof=1))
            rej = float(np.mean(mods > critical)) if kind == "power" else float("nan")
        else:
            mean_rho = var_rho = rej = float("nan")
        cells.append(
            McCell(kind, param, t_tilde, len(block), mean_rho, var_rho, rej, float("nan"))
        )

    # Per-scheme regression of log var(rho) on log t_tilde.
    n_t = len(exp.t_tilde_grid)
    out = []
    for s_idx in range(len(exp.schemes)):
        group = cells[s_idx * n_t : (s_idx + 1) * n_t]
        usable = [c for c in group if np.isfinite(c.var_rho) and c.var_rho > 0]
        slope = float("nan")
        if len(usable) >= 2:
            lx = np.log([c.t_tilde for c in usable])
            ly = np.log([c.var_rho for c in usable])
            lxd = lx - lx.mean()
            slope = float(np.dot(lxd, ly - ly.mean()) / np.dot(lxd, lxd))
        for cell in group:
            out.append(McCell(cell.framework, cell.param, cell.t_tilde, cell.reps,
                              cell.mean_rho, cell.var_rho, cell.rejection_rate, slope))
    return out
