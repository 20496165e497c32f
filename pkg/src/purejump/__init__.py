"""Pure-jump transaction-level price model: simulation, moments, estimation,
and long-horizon return-predictability tests."""

__version__ = "0.1.0"

from .aggregate import (
    LinearGrowth,
    MonthlyPanel,
    PowerLaw,
    build_panel,
    resolve_horizon,
    rho_hat,
    rho_tilde,
)
from .estimate import EstimateReport, estimate_params
from .fgn import FgnGrid, GammaSpec, gamma_z, simulate_fgn
from .inference import (
    McExperiment,
    TestReport,
    estimate_gph,
    run_mc_experiment,
    test_asymptotic,
    test_bootstrap,
    test_linear_simulated,
)
from .moments import (
    ModelParams,
    MomentTable,
    compute_h,
    cov_aggregated_returns,
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
    var_sqreturn,
)
from .simulate import (
    DailySeries,
    PathConfig,
    simulate_counts,
    simulate_intensity,
    simulate_path,
    simulate_two_shock_path,
)

__all__ = [
    "DailySeries",
    "EstimateReport",
    "FgnGrid",
    "GammaSpec",
    "LinearGrowth",
    "McExperiment",
    "ModelParams",
    "MomentTable",
    "MonthlyPanel",
    "PathConfig",
    "PowerLaw",
    "TestReport",
    "build_panel",
    "compute_h",
    "cov_aggregated_returns",
    "cov_counts",
    "cov_return_sqreturn",
    "cov_returns",
    "cov_sqreturns",
    "estimate_gph",
    "estimate_params",
    "gamma_z",
    "mean_count",
    "mean_return",
    "moment_table",
    "resolve_horizon",
    "rho_hat",
    "rho_limit",
    "rho_tilde",
    "run_mc_experiment",
    "simulate_counts",
    "simulate_fgn",
    "simulate_intensity",
    "simulate_path",
    "simulate_two_shock_path",
    "test_asymptotic",
    "test_bootstrap",
    "test_linear_simulated",
    "var_counts",
    "var_return",
    "var_sqreturn",
]
