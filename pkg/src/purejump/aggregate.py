"""Calendar aggregation, horizon frameworks, and the sample correlations.

Months have ``m`` trading days.  The forward aggregated return over the next
``H`` months from month-end ``t`` sums days ``t m + 1 .. (t + H) m``; the
backward realized variance sums squared days ``(t - H) m + 1 .. t m``.  The
modified forward return skips the first ``h`` days of the window to break
short-memory dependence on the backward window.

``rho_hat`` correlates forward returns and backward realized variance over
month ends ``t = H .. T - H`` (every fully overlapping pair); ``rho_tilde``
uses the modified windows over ``t = H + 1 .. T - H``, reproducing each
display of the sample statistics literally.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, InsufficientData


@dataclass(frozen=True)
class PowerLaw:
    """Horizon ``H = floor(T^kappa)`` months, ``kappa`` in (0, 1)."""

    kappa: float

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"kappa must be in (0, 1), got {self.kappa}")


@dataclass(frozen=True)
class LinearGrowth:
    """Horizon ``H = floor(theta T)`` months, ``theta`` in (0, 1)."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must be in (0, 1), got {self.theta}")


def resolve_horizon(scheme, t_tilde: int) -> int:
    """Integer horizon in months for ``t_tilde`` available months, minimum 1."""
    if isinstance(scheme, PowerLaw):
        h = int(np.floor(t_tilde**scheme.kappa))
    elif isinstance(scheme, LinearGrowth):
        h = int(np.floor(scheme.theta * t_tilde))
    else:
        raise TypeError(f"unknown aggregation scheme {scheme!r}")
    return max(h, 1)


@dataclass(frozen=True)
class MonthlyPanel:
    """Aggregated windows indexed directly by month-end ``t = 0 .. t_tilde``.

    Entries outside a window's valid range are NaN.
    """

    m: int
    h: int
    h_tilde: int
    t_tilde: int
    monthly_returns: np.ndarray
    monthly_rv: np.ndarray
    forward_r: np.ndarray
    backward_rv: np.ndarray
    modified_r: np.ndarray


def build_panel(series, m: int, h_tilde: int, h: int = 0) -> MonthlyPanel:
    """Aggregate a daily series into overlapping monthly windows.

    ``series`` is a DailySeries or a plain array of daily returns.  Requires
    at least ``(2 h_tilde + 1) m`` days and a skip lag ``0 <= h < m h_tilde``.
    """
    returns = np.asarray(getattr(series, "returns", series), dtype=float)
    t_tilde = len(returns) // m
    if len(returns) < 2 * h_tilde * m:
        raise InsufficientData(
            f"need at least {2 * h_tilde * m} daily returns for horizon "
            f"{h_tilde}, got {len(returns)}"
        )
    if not 0 <= h < m * h_tilde:
        raise InsufficientData(f"skip lag h={h} must be in [0, m*h_tilde)")
    r = returns[: t_tilde * m]
    cs = np.concatenate([[0.0], np.cumsum(r)])
    cs2 = np.concatenate([[0.0], np.cumsum(r * r)])

    ends = np.arange(t_tilde + 1) * m
    monthly_returns = cs[ends[1:]] - cs[ends[:-1]]
    monthly_rv = cs2[ends[1:]] - cs2[ends[:-1]]

    forward_r = np.full(t_tilde + 1, np.nan)
    modified_r = np.full(t_tilde + 1, np.nan)
    backward_rv = np.full(t_tilde + 1, np.nan)
    head = np.arange(0, t_tilde - h_tilde + 1)
    forward_r[head] = cs[(head + h_tilde) * m] - cs[head * m]
    modified_r[head] = cs[(head + h_tilde) * m] - cs[head * m + h]
    tail = np.arange(h_tilde, t_tilde + 1)
    backward_rv[tail] = cs2[tail * m] - cs2[(tail - h_tilde) * m]
    return MonthlyPanel(
        m, h, h_tilde, t_tilde, monthly_returns, monthly_rv, forward_r, backward_rv, modified_r
    )


def _correlation(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    vx = float(np.dot(xd, xd))
    vy = float(np.dot(yd, yd))
    if vx == 0.0 or vy == 0.0:
        raise DegenerateVariance("a window series is constant; correlation undefined")
    return float(np.dot(xd, yd) / np.sqrt(vx * vy))


def rho_hat(panel: MonthlyPanel) -> float:
    """Overlapping-window correlation of forward returns and backward RV."""
    idx = np.arange(panel.h_tilde, panel.t_tilde - panel.h_tilde + 1)
    return _correlation(panel.forward_r[idx], panel.backward_rv[idx])


def rho_tilde(panel: MonthlyPanel) -> float:
    """Modified correlation: skip-``h`` forward windows, shifted index range."""
    idx = np.arange(panel.h_tilde + 1, panel.t_tilde - panel.h_tilde + 1)
    if len(idx) < 2:
        raise DegenerateVariance("fewer than two modified windows available")
    return _correlation(panel.modified_r[idx], panel.backward_rv[idx])
