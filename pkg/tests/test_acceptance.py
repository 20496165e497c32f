"""Acceptance suite: every criterion at its stated tolerance, one line each.

Monte Carlo estimators of population moments center at the known population
means (unbiased under stationarity; sample-mean centering would push the
long-memory cells toward the band edges).  Heavy nested runs are parallelized
over outer replications; all seeds are fixed constants.
"""

import math

import numpy as np
import pytest
from scipy import stats as sstats

from purejump.aggregate import LinearGrowth, PowerLaw, build_panel, resolve_horizon, rho_hat, rho_tilde
from purejump.estimate import estimate_params, match_count_covariances
from purejump.fgn import FgnGrid, GammaSpec, simulate_fgn
from purejump.inference import (
    McExperiment,
    _parallel_map,
    estimate_gph,
    normality_diagnostic,
    resolve_workers,
    run_mc_experiment,
)
from purejump.moments import (
    ModelParams,
    compute_h,
    cov_counts,
    cov_return_sqreturn,
    cov_returns,
    cov_sqreturns,
    mean_count,
    mean_return,
    moment_table,
    rho_limit,
    var_counts,
    var_return,
)
from purejump.simulate import PathConfig, simulate_path
from conftest import PAPER_LAM, PAPER_MU, PAPER_SIGMA_E, paper_params

M = 20
WORKERS = resolve_workers()


def report(criterion: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion}: {detail}"


# ---------------------------------------------------------------------------
# Criterion 1: closed-form moments vs Monte Carlo, d in {0, 0.35}
# ---------------------------------------------------------------------------

def _moment_unit(args):
    d, seed = args
    p = paper_params(d)
    series = simulate_path(p, PathConfig(5000, seed=seed))
    n = series.counts.astype(float)
    r = series.returns
    mu_n = mean_count(p)
    mu_r = mean_return(p)
    mu_r2 = var_return(p) + mu_r**2
    nd = n - mu_n
    rd = r - mu_r
    r2d = r * r - mu_r2
    return (
        n.mean(),
        float(np.mean(nd * nd)),
        float(np.mean(rd * rd)),
        float(np.mean(rd[:-1] * rd[1:])),
        float(np.mean(rd[1:] * r2d[:-1])),
        float(np.mean(r2d[:-1] * r2d[1:])),
    )


@pytest.mark.parametrize("d", [0.0, 0.35])
def test_criterion_1_moment_oracle(d):
    p = paper_params(d)
    targets = {
        "E[dN]": mean_count(p),
        "var(dN)": var_counts(p),
        "var(r)": var_return(p),
        "cov(r0,r1)": cov_returns(p, 1),
        "cov(r1,r0^2)": cov_return_sqreturn(p, 1),
        "cov(r0^2,r1^2)": cov_sqreturns(p, 1),
    }
    rows = np.array(_parallel_map(_moment_unit, [(d, 3000 + s) for s in range(200)], WORKERS))
    zs = {}
    for j, name in enumerate(targets):
        se = rows[:, j].std(ddof=1) / np.sqrt(len(rows))
        zs[name] = (rows[:, j].mean() - targets[name]) / se
    worst = max(abs(z) for z in zs.values())
    detail = f"d={d}: " + " ".join(f"{k} z={v:+.2f}" for k, v in zs.items())
    report("criterion-1 (moment oracle)", worst < 4.0, detail)


# ---------------------------------------------------------------------------
# Criterion 2: h-dependence at d = 0, c = 1
# ---------------------------------------------------------------------------

def _lag2_unit(seed):
    p = paper_params(0.0)
    series = simulate_path(p, PathConfig(5000, seed=seed))
    n = series.counts.astype(float) - mean_count(p)
    r = series.returns - mean_return(p)
    r2 = series.returns**2 - (var_return(p) + mean_return(p) ** 2)
    return (
        float(np.mean(n[:-2] * n[2:])),
        float(np.mean(r[:-2] * r[2:])),
        float(np.mean(r2[:-2] * r2[2:])),
    )


def test_criterion_2_h_dependence():
    p = paper_params(0.0)
    population_zero = all(
        fn(p, L) == 0.0
        for fn in (cov_counts, cov_returns, cov_return_sqreturn, cov_sqreturns)
        for L in (2, 3, 5)
    )
    rows = np.array(_parallel_map(_lag2_unit, list(range(4000, 4100)), WORKERS))
    zs = rows.mean(axis=0) / (rows.std(axis=0, ddof=1) / np.sqrt(len(rows)))
    ok = population_zero and np.all(np.abs(zs) < 4.0)
    report(
        "criterion-2 (h-dependence)",
        ok,
        f"population lags>1 exactly zero: {population_zero}; sample lag-2 z (counts, r, r^2): "
        + " ".join(f"{z:+.2f}" for z in zs),
    )


# ---------------------------------------------------------------------------
# Criterion 3: variance-scaling slopes
# ---------------------------------------------------------------------------

def test_criterion_3_variance_scaling_slopes():
    exp = McExperiment(
        paper_params(0.0), M, [131, 262, 524],
        [PowerLaw(0.1), PowerLaw(0.3), LinearGrowth(0.05)],
        reps=300, base_seed=512, workers=WORKERS,
    )
    cells = run_mc_experiment(exp)
    slopes = {}
    for cell in cells:
        slopes.setdefault((cell.framework, cell.param), cell.slope)
    ok_power = all(
        abs(slopes[("power", kappa)] - (kappa - 1.0)) <= 0.15 for kappa in (0.1, 0.3)
    )
    ok_linear = abs(slopes[("linear", 0.05)]) < 0.15
    detail = (
        f"slope(k=0.1)={slopes[('power', 0.1)]:+.3f} (target -0.9+-0.15), "
        f"slope(k=0.3)={slopes[('power', 0.3)]:+.3f} (target -0.7+-0.15), "
        f"slope(theta=0.05)={slopes[('linear', 0.05)]:+.3f} (|.|<0.15)"
    )
    report("criterion-3 (variance-scaling slopes)", ok_power and ok_linear, detail)


# ---------------------------------------------------------------------------
# Criterion 4: approach toward the long-horizon correlation limit
# ---------------------------------------------------------------------------

def _rho_unit(args):
    t_tilde, seed = args
    p = paper_params(0.3545)
    path = simulate_path(p, PathConfig(t_tilde * M, seed=seed))
    h_tilde = resolve_horizon(PowerLaw(0.1), t_tilde)
    return rho_hat(build_panel(path.returns, M, h_tilde, 0))


def test_criterion_4_limit_approach():
    grid = (131, 524, 2097)
    means, ses = [], []
    for i, t_tilde in enumerate(grid):
        vals = np.array(
            _parallel_map(_rho_unit, [(t_tilde, (900, i, r)) for r in range(200)], WORKERS)
        )
        means.append(vals.mean())
        ses.append(vals.std(ddof=1) / np.sqrt(len(vals)))
    limit = rho_limit(0.3545)
    no_significant_drop = all(
        means[i + 1] - means[i] > -2.0 * math.hypot(ses[i], ses[i + 1]) for i in range(2)
    )
    overall_up = means[-1] > means[0]
    below_limit = all(m < limit for m in means)
    detail = (
        " -> ".join(f"{m:.4f}" for m in means)
        + f" (limit {limit:.4f}); monotone within MC error: {no_significant_drop}"
    )
    report(
        "criterion-4 (limit approach)", no_significant_drop and overall_up and below_limit, detail
    )


# ---------------------------------------------------------------------------
# Criterion 5: null size (asymptotic with population ingredients + bootstrap)
# ---------------------------------------------------------------------------

def _null_stat_unit(args):
    seed, kappa = args
    p0 = paper_params(0.0)
    t_tilde = 1048
    path = simulate_path(p0, PathConfig(t_tilde * M, seed=seed))
    h_tilde = resolve_horizon(PowerLaw(kappa), t_tilde)
    panel = build_panel(path.returns, M, h_tilde, compute_h(1.0))
    norm = math.sqrt(t_tilde ** (1.0 - kappa))
    return norm * rho_tilde(panel), norm * rho_hat(panel)


def test_criterion_5a_asymptotic_null_size():
    stats = np.array(
        _parallel_map(_null_stat_unit, [((5100, r), 0.3) for r in range(500)], WORKERS)
    )
    table = moment_table(paper_params(0.0), M)
    critical = sstats.norm.ppf(0.95) * math.sqrt(table.variance_ratio)
    rejections = int(np.sum(stats[:, 0] > critical))
    lo = int(sstats.binom.ppf(0.025, 500, 0.05))
    hi = int(sstats.binom.ppf(0.975, 500, 0.05))
    ok = lo <= rejections <= hi
    # Normality diagnostic on the rescaled statistics (stands in for the
    # out-of-scope Shapiro-Wilk check): no rejection at the 1% level.
    diag_mod = normality_diagnostic(stats[:500, 1])
    normal_ok = diag_mod["skew_p"] > 0.01 and diag_mod["kurtosis_p"] > 0.01
    detail = (
        f"rejections {rejections}/500 (band [{lo}, {hi}]), scaled var "
        f"{stats[:, 0].var(ddof=1):.4f} (2/3), normality p=({diag_mod['skew_p']:.3f}, "
        f"{diag_mod['kurtosis_p']:.3f})"
    )
    report("criterion-5a (asymptotic size + normality)", ok and normal_ok, detail)


def _bootstrap_unit(args):
    d, t_tilde, kappas, B, base, rep = args
    p = paper_params(d)
    path = simulate_path(p, PathConfig(t_tilde * M, seed=(base, rep)))
    est = estimate_params(path)
    p0 = est.params(force_d=0.0)
    observed = {}
    for kappa in kappas:
        h_tilde = resolve_horizon(PowerLaw(kappa), t_tilde)
        panel = build_panel(path.returns, M, h_tilde, 0)
        observed[kappa] = math.sqrt(t_tilde ** (1.0 - kappa)) * rho_hat(panel)
    sims = {kappa: [] for kappa in kappas}
    for b in range(B):
        null = simulate_path(p0, PathConfig(t_tilde * M, seed=(base, rep, b)))
        for kappa in kappas:
            h_tilde = resolve_horizon(PowerLaw(kappa), t_tilde)
            panel = build_panel(null.returns, M, h_tilde, 0)
            sims[kappa].append(math.sqrt(t_tilde ** (1.0 - kappa)) * rho_hat(panel))
    return [observed[k] > np.quantile(sims[k], 0.95) for k in kappas]


def test_criterion_5b_bootstrap_null_size():
    rejections = np.array(
        _parallel_map(
            _bootstrap_unit, [(0.0, 1048, (0.3,), 200, 5200, r) for r in range(200)], WORKERS
        )
    )
    size = float(rejections[:, 0].mean())
    report(
        "criterion-5b (bootstrap size, 200x200)",
        0.02 <= size <= 0.10,
        f"empirical size {size:.3f} in [0.02, 0.10]",
    )


# ---------------------------------------------------------------------------
# Criterion 6: bootstrap power ordering across kappa
# ---------------------------------------------------------------------------

def test_criterion_6_bootstrap_power_ordering():
    rejections = np.array(
        _parallel_map(
            _bootstrap_unit,
            [(0.3545, 1048, (0.1, 0.7), 200, 5300, r) for r in range(200)],
            WORKERS,
        )
    )
    p_low = float(rejections[:, 0].mean())
    p_high = float(rejections[:, 1].mean())
    ok = (p_low > p_high) and abs(p_low - 0.356) <= 0.1 and abs(p_high - 0.072) <= 0.1
    report(
        "criterion-6 (bootstrap power ordering)",
        ok,
        f"power(k=0.1)={p_low:.3f} (paper 0.356+-0.1), power(k=0.7)={p_high:.3f} "
        f"(paper 0.072+-0.1)",
    )


# ---------------------------------------------------------------------------
# Criterion 7: estimator recovery
# ---------------------------------------------------------------------------

def _estimate_unit(seed):
    series = simulate_path(paper_params(0.0), PathConfig(83_886, seed=seed))
    rep = estimate_params(series)
    return rep.mu_hat, rep.lambda_hat, rep.sigma_e_hat, rep.c_hat, rep.d_hat


def test_criterion_7_estimator_recovery():
    worst_closed = 0.0
    for c in (0.5, 1.0, 2.0):
        for d in (0.0, 0.15, 0.25, 0.35):
            p = ModelParams(PAPER_MU, PAPER_LAM, PAPER_SIGMA_E, GammaSpec(c, d))
            c_hat, d_hat, _ = match_count_covariances(
                PAPER_LAM, cov_counts(p, 1), cov_counts(p, 2), gamma_tiebreak=cov_counts(p, 3)
            )
            worst_closed = max(worst_closed, abs(c_hat - c), abs(d_hat - d))
    rows = np.array(_parallel_map(_estimate_unit, [(7100, s) for s in range(100)], WORKERS))
    means = rows.mean(axis=0)
    rel_mu = abs(means[0] / PAPER_MU - 1.0)
    rel_lam = abs(means[1] / PAPER_LAM - 1.0)
    rel_sig = abs(means[2] / PAPER_SIGMA_E - 1.0)
    ok = (
        worst_closed < 1e-6
        and rel_mu < 0.01
        and rel_lam < 0.01
        and rel_sig < 0.01
        and abs(means[4]) < 0.01
        and abs(means[3] - 1.0) < 0.01
    )
    detail = (
        f"closed-loop worst {worst_closed:.1e}; mean rel err mu {rel_mu:.4f}, "
        f"lam {rel_lam:.4f}, sigma {rel_sig:.4f}; mean d^ {means[4]:+.5f}, "
        f"mean c^ {means[3]:.4f}"
    )
    report("criterion-7 (estimator recovery)", ok, detail)


# ---------------------------------------------------------------------------
# Criterion 8: factorization identity
# ---------------------------------------------------------------------------

def test_criterion_8_factorization():
    worst = 0.0
    for c in (0.5, 1.0, 2.0):
        for d in (0.0, 0.15, 0.25, 0.35):
            for mu, sig in ((PAPER_MU, PAPER_SIGMA_E), (0.0, PAPER_SIGMA_E), (2e-6, 1e-5)):
                p = ModelParams(mu, PAPER_LAM, sig, GammaSpec(c, d))
                table = moment_table(p, M)
                rel = abs(table.s2 - (2.0 / 3.0) * table.a1 * table.a2) / table.s2
                worst = max(worst, rel)
    report(
        "criterion-8 (S^2 = (2/3) A1 A2)",
        worst < 1e-12,
        f"worst relative deviation {worst:.2e} over the parameter grid",
    )


# ---------------------------------------------------------------------------
# Criterion 9: GPH masking
# ---------------------------------------------------------------------------

def _gph_unit(seed):
    path = simulate_path(paper_params(0.35), PathConfig(80_000, seed=seed))
    return estimate_gph(path.returns, 0.5)


def test_criterion_9_gph_masking():
    model_ds = np.array(_parallel_map(_gph_unit, [(9200, s) for s in range(50)], WORKERS))
    masked_fraction = float(np.mean(np.abs(model_ds) < 0.15))
    spec = GammaSpec(1.0, 0.35)
    grid = FgnGrid(2**14)
    raw_ds = [estimate_gph(simulate_fgn(spec, grid, (9300, s)), 0.5) for s in range(50)]
    raw_mean = float(np.mean(raw_ds))
    ok = masked_fraction >= 0.9 and abs(raw_mean - 0.35) < 0.05
    report(
        "criterion-9 (GPH masking)",
        ok,
        f"|d^|<0.15 on model returns in {masked_fraction:.0%} of 50 seeds "
        f"(mean {model_ds.mean():+.4f}); raw-noise mean d^ {raw_mean:.4f}",
    )
