"""Method-of-moments parameter recovery from counts and returns.

The drift, baseline intensity and shock scale come from sample means and
variances in closed form.  The pair ``(c, d)`` solves the two-equation system
matching the model's lag-1 and lag-2 count autocovariances to their sample
counterparts, via nested bisection: the inner solve pins ``c`` from the lag-1
equation for a trial ``d`` (the model lag-1 covariance is decreasing in
``c``), the outer solve drives the lag-2 residual to zero.  The outer
residual can cross zero twice (two parameter pairs can reproduce both lag
covariances exactly, e.g. around ``c = 1/2``), so every crossing on a ``d``
grid is refined and ties are broken by the lag-3 autocovariance.  When no
interior crossing exists the estimate clamps to the short-memory boundary
``d = 0`` with ``c`` matched from lag 1 alone.

Sample autocovariances use the biased ``1/n`` normalization throughout.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeSampleCov, NoRoot, ZeroCounts
from .fgn import GammaSpec
from .quadrature import E, SQRT_E, weighted_lag_integral

C_BOUNDS = (0.05, 20.0)
D_BOUNDS = (0.0, 0.49)
BISECT_STEPS = 60
D_SCAN_POINTS = 50
RESIDUAL_RTOL = 1e-8
# Relative lag-1 residual beyond which a boundary fit is reported as NoRoot.
GROSS_RTOL = 1e-3


@dataclass(frozen=True)
class EstimateReport:
    """Point estimates plus solver diagnostics."""

    mu_hat: float
    lambda_hat: float
    sigma_e_hat: float
    c_hat: float
    d_hat: float
    sigma_e_flagged: bool = False
    converged: bool = True
    d_boundary: str | None = None
    iterations: int = 0
    residuals: tuple = (0.0, 0.0)

    def params(self, force_d: float | None = None):
        from .moments import ModelParams

        d = self.d_hat if force_d is None else force_d
        return ModelParams(self.mu_hat, self.lambda_hat, self.sigma_e_hat, GammaSpec(self.c_hat, d))


def sample_autocov(x: np.ndarray, lag: int) -> float:
    """Biased (1/n) sample autocovariance at ``lag``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    xd = x - x.mean()
    if lag == 0:
        return float(np.dot(xd, xd) / n)
    return float(np.dot(xd[:-lag], xd[lag:]) / n)


def estimate_mu_lambda(series) -> tuple[float, float]:
    """``mu_hat = rbar / dNbar`` and ``lambda_hat = dNbar / e^{1/2}``."""
    counts_mean = float(np.mean(series.counts))
    if counts_mean == 0.0:
        raise ZeroCounts("count series has zero mean; mu and lambda unidentified")
    return float(np.mean(series.returns)) / counts_mean, counts_mean / SQRT_E


def estimate_sigma_e(series, mu_hat: float, lambda_hat: float) -> tuple[float, bool]:
    """Shock scale from the variance split; flagged (and zero) if negative."""
    var_r = sample_autocov(series.returns, 0)
    var_n = sample_autocov(series.counts, 0)
    sigma2 = (var_r - mu_hat**2 * var_n) / (lambda_hat * SQRT_E)
    if sigma2 < 0:
        return 0.0, True
    return float(np.sqrt(sigma2)), False


def _model_count_cov(lag: int, c: float, d: float, lambda_hat: float) -> float:
    return lambda_hat**2 * E * weighted_lag_integral(GammaSpec(c, d), float(lag))


def match_count_covariances(
    lambda_hat: float,
    gamma1: float,
    gamma2: float,
    lags: tuple[int, int] = (1, 2),
    gamma_tiebreak: float | None = None,
):
    """Solve the two count-autocovariance equations for ``(c, d)``.

    ``gamma_tiebreak`` is the sample lag-(lags[1]+1) autocovariance, used only
    when the system has several exact roots.  Returns ``(c_hat, d_hat,
    diagnostics)``; raises NegativeSampleCov for an unusable lag-1 target and
    NoRoot when even the boundary fit leaves a gross lag-1 residual.
    """
    if gamma1 <= 0:
        raise NegativeSampleCov(f"lag-{lags[0]} sample count autocovariance {gamma1:.3e} <= 0")
    evals = 0

    def solve_c(d: float) -> tuple[float, float]:
        nonlocal evals
        lo, hi = C_BOUNDS
        f_lo = _model_count_cov(lags[0], lo, d, lambda_hat) - gamma1
        f_hi = _model_count_cov(lags[0], hi, d, lambda_hat) - gamma1
        evals += 2
        if f_lo <= 0.0:  # target above what the slowest time scale produces
            return lo, f_lo
        if f_hi >= 0.0:  # target below the fastest time scale
            return hi, f_hi
        for _ in range(BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            f_mid = _model_count_cov(lags[0], mid, d, lambda_hat) - gamma1
            evals += 1
            if f_mid >= 0.0:
                lo = mid
            else:
                hi = mid
        mid = 0.5 * (lo + hi)
        return mid, _model_count_cov(lags[0], mid, d, lambda_hat) - gamma1

    def resid2(d: float) -> tuple[float, float, float]:
        c, r1 = solve_c(d)
        return _model_count_cov(lags[1], c, d, lambda_hat) - gamma2, c, r1

    # Scan the d range for every sign change of the lag-2 residual and refine
    # each bracket; the system can have two exact roots.
    d_grid = np.linspace(D_BOUNDS[0], D_BOUNDS[1], D_SCAN_POINTS)
    r_grid = [resid2(d)[0] for d in d_grid]
    roots = []
    for i in range(D_SCAN_POINTS - 1):
        if r_grid[i] == 0.0:
            roots.append(d_grid[i])
            continue
        if r_grid[i] * r_grid[i + 1] < 0.0:
            lo, hi = d_grid[i], d_grid[i + 1]
            r_at_lo = r_grid[i]
            for _ in range(BISECT_STEPS):
                mid = 0.5 * (lo + hi)
                r_mid, _, _ = resid2(mid)
                if (r_mid > 0.0) == (r_at_lo > 0.0):
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    if r_grid[-1] == 0.0:
        roots.append(d_grid[-1])

    boundary = None
    if not roots:
        if r_grid[0] >= 0.0:
            d_hat, boundary = D_BOUNDS[0], "short-memory"
        else:
            d_hat, boundary = D_BOUNDS[1], "upper"
    elif len(roots) == 1:
        d_hat = roots[0]
    else:
        lag3 = lags[1] + 1
        if gamma_tiebreak is None:
            # Without extra information keep the larger-memory root.
            d_hat = max(roots)
        else:
            def mismatch(d):
                c, _ = solve_c(d)
                return abs(_model_count_cov(lag3, c, d, lambda_hat) - gamma_tiebreak)

            d_hat = min(roots, key=mismatch)

    res2, c_hat, res1 = resid2(d_hat)
    rel1 = abs(res1) / gamma1
    rel2 = abs(res2) / max(abs(gamma2), 1e-300)
    diagnostics = {
        "iterations": evals,
        "residuals": (rel1, rel2),
        "d_boundary": boundary,
        "n_roots": len(roots),
        "converged": rel1 <= RESIDUAL_RTOL
        and (boundary is not None or rel2 <= max(RESIDUAL_RTOL, 1e-6)),
    }
    if rel1 > GROSS_RTOL:
        raise NoRoot(
            f"lag-{lags[0]} equation unsolvable within c bounds {C_BOUNDS}: "
            f"relative residual {rel1:.2e}",
            best=(c_hat, d_hat),
            diagnostics=diagnostics,
        )
    return c_hat, d_hat, diagnostics


def estimate_c_d(series, lambda_hat: float, lags: tuple[int, int] = (1, 2)):
    """Match sample count autocovariances at ``lags`` (default 1 and 2)."""
    gamma1 = sample_autocov(series.counts, lags[0])
    gamma2 = sample_autocov(series.counts, lags[1])
    gamma3 = sample_autocov(series.counts, lags[1] + 1)
    return match_count_covariances(lambda_hat, gamma1, gamma2, lags, gamma_tiebreak=gamma3)


def estimate_params(series, lags: tuple[int, int] = (1, 2)) -> EstimateReport:
    """Full method-of-moments fit of ``(mu, lambda, sigma_e, c, d)``."""
    mu_hat, lambda_hat = estimate_mu_lambda(series)
    sigma_e_hat, flagged = estimate_sigma_e(series, mu_hat, lambda_hat)
    c_hat, d_hat, diag = estimate_c_d(series, lambda_hat, lags)
    return EstimateReport(
        mu_hat=mu_hat,
        lambda_hat=lambda_hat,
        sigma_e_hat=sigma_e_hat,
        c_hat=c_hat,
        d_hat=d_hat,
        sigma_e_flagged=flagged,
        converged=diag["converged"],
        d_boundary=diag["d_boundary"],
        iterations=diag["iterations"],
        residuals=diag["residuals"],
    )
