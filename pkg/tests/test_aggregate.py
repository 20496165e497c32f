import numpy as np
import pytest

from purejump.aggregate import (
    LinearGrowth,
    PowerLaw,
    build_panel,
    resolve_horizon,
    rho_hat,
    rho_tilde,
)
from purejump.errors import DegenerateVariance, InsufficientData


class TestResolveHorizon:
    def test_power_law_examples(self):
        assert resolve_horizon(PowerLaw(0.5), 524) == 22
        assert resolve_horizon(PowerLaw(0.1), 131) == 1

    def test_linear_growth_example(self):
        assert resolve_horizon(LinearGrowth(0.25), 131) == 32

    def test_minimum_one(self):
        assert resolve_horizon(PowerLaw(0.05), 2) == 1

    def test_scheme_validation(self):
        with pytest.raises(ValueError):
            PowerLaw(1.0)
        with pytest.raises(ValueError):
            LinearGrowth(0.0)
        with pytest.raises(TypeError):
            resolve_horizon(object(), 10)


class TestBuildPanel:
    def test_hand_windows(self):
        panel = build_panel(np.array([1.0, 2.0, 3.0, 4.0]), m=2, h_tilde=1)
        assert panel.forward_r[1] == 7.0  # days 3 and 4
        assert panel.backward_rv[1] == 5.0  # 1^2 + 2^2
        assert panel.monthly_returns.tolist() == [3.0, 7.0]
        assert panel.monthly_rv.tolist() == [5.0, 25.0]

    def test_skip_lag_drops_leading_days(self):
        panel = build_panel(np.array([1.0, 2.0, 3.0, 4.0]), m=2, h_tilde=1, h=1)
        assert panel.modified_r[1] == 4.0

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            build_panel(np.ones(30), m=10, h_tilde=2)
        with pytest.raises(InsufficientData):
            build_panel(np.ones(100), m=10, h_tilde=2, h=25)

    def test_window_counts_match_displays(self, rng):
        returns = rng.standard_normal(20 * 40)
        panel = build_panel(returns, m=20, h_tilde=5, h=1)
        t, ht = panel.t_tilde, panel.h_tilde
        hat_idx = np.arange(ht, t - ht + 1)
        tilde_idx = np.arange(ht + 1, t - ht + 1)
        assert len(hat_idx) == t - 2 * ht + 1
        assert len(tilde_idx) == t - 2 * ht
        assert not np.any(np.isnan(panel.forward_r[hat_idx]))
        assert not np.any(np.isnan(panel.backward_rv[hat_idx]))
        assert not np.any(np.isnan(panel.modified_r[tilde_idx]))


class TestCorrelations:
    def test_identical_series_correlate_to_one(self):
        # hand-built panel whose forward and backward windows coincide
        from purejump.aggregate import MonthlyPanel

        values = np.array([np.nan, 3.0, 1.0, 4.0, 1.0, 5.0, np.nan])
        panel = MonthlyPanel(
            m=2, h=0, h_tilde=1, t_tilde=6,
            monthly_returns=np.zeros(6), monthly_rv=np.zeros(6),
            forward_r=values, backward_rv=values, modified_r=values,
        )
        assert rho_hat(panel) == pytest.approx(1.0, abs=1e-12)

    def test_constant_backward_series_degenerate(self):
        returns = np.ones(80)
        panel = build_panel(returns, m=2, h_tilde=1)
        with pytest.raises(DegenerateVariance):
            rho_hat(panel)

    def test_bounds(self, rng):
        for _ in range(10):
            returns = rng.standard_normal(20 * 30)
            panel = build_panel(returns, m=20, h_tilde=3, h=1)
            assert -1.0 <= rho_hat(panel) <= 1.0
            assert -1.0 <= rho_tilde(panel) <= 1.0

    def test_scale_invariance(self, rng):
        returns = rng.standard_normal(20 * 50)
        a = rho_hat(build_panel(returns, m=20, h_tilde=4))
        b = rho_hat(build_panel(returns * 137.5, m=20, h_tilde=4))
        assert a == pytest.approx(b, abs=1e-12)

    def test_zero_skip_recovers_plain_correlation_on_shifted_range(self, rng):
        returns = rng.standard_normal(20 * 30)
        panel = build_panel(returns, m=20, h_tilde=3, h=0)
        idx = np.arange(panel.h_tilde + 1, panel.t_tilde - panel.h_tilde + 1)
        x = panel.forward_r[idx] - panel.forward_r[idx].mean()
        y = panel.backward_rv[idx] - panel.backward_rv[idx].mean()
        expected = float(np.dot(x, y) / np.sqrt(np.dot(x, x) * np.dot(y, y)))
        assert rho_tilde(panel) == pytest.approx(expected, abs=1e-13)

    def test_single_window_degenerate(self):
        returns = np.arange(1.0, 5.0)
        panel = build_panel(returns, m=2, h_tilde=1, h=1)
        with pytest.raises(DegenerateVariance):
            rho_tilde(panel)
