"""Path simulation: intensity, counting process, daily counts and returns.

The intensity path is the exponential of an exact fractional-Gaussian-noise
grid with ``steps_per_day`` points per day, Riemann-summed to a cumulative
day-level measure.  Counts come from i.i.d. exponential durations with mean
``1/lam`` raced against the cumulative intensity expressed in the durations'
operational time (so that, conditionally on the intensity, the day counts are
Poisson with the Riemann-sum mean).  Shocks are Gaussian; only their per-day
sums enter the daily series, so each day draws one normal scaled by the root
of its count.

One 64-bit path seed feeds three fixed sub-streams (noise grid, durations,
shocks): changing the shock scale never perturbs the count path.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DurationPoolExhausted, InvalidDriftPair
from .fgn import (
    STREAM_DURATIONS,
    STREAM_SHOCKS,
    FgnGrid,
    next_pow2,
    rng_for,
    simulate_fgn,
)
from .moments import ModelParams

_DURATION_BLOCK = 1 << 21


@dataclass(frozen=True)
class PathConfig:
    """Horizon ``t_days``, grid steps per day, days per month, seed, duration cap."""

    t_days: int
    steps_per_day: int = 50
    days_per_month: int = 20
    seed: int = 0
    duration_pool: int = 0  # 0 = automatic generous cap

    def __post_init__(self):
        if self.t_days < 1 or self.steps_per_day < 1 or self.days_per_month < 1:
            raise ValueError("t_days, steps_per_day and days_per_month must all be >= 1")


@dataclass(frozen=True)
class DailySeries:
    """Aligned per-day counts, returns and log prices from one path."""

    counts: np.ndarray
    returns: np.ndarray
    log_price: np.ndarray
    params: ModelParams | None = None
    config: PathConfig | None = None

    def __post_init__(self):
        if not (len(self.counts) == len(self.returns) == len(self.log_price)):
            raise ValueError("counts, returns and log_price must have equal length")
        if np.any(self.counts < 0):
            raise ValueError("counts must be nonnegative")
        if np.any(np.diff(self.log_price, prepend=0.0) != self.returns):
            raise ValueError("log-price increments must equal returns exactly")

    def __len__(self) -> int:
        return len(self.returns)


def simulate_intensity(p: ModelParams, cfg: PathConfig, entropy=None) -> np.ndarray:
    """Cumulative Riemann-sum intensity at day boundaries, ``k = 1..t_days``.

    ``(1/M) * sum_{j <= kM} lam * exp(X_j)`` on a noise grid of ``t_days * M``
    points, generated on the next power of two and truncated.
    """
    m = cfg.steps_per_day
    n_grid = cfg.t_days * m
    grid = FgnGrid(next_pow2(n_grid), 1.0 / m)
    x = simulate_fgn(p.gamma, grid, entropy if entropy is not None else cfg.seed)
    path = np.exp(x[:n_grid])
    cum = np.cumsum(path)
    return p.lam * cum[m - 1 :: m] / m


def simulate_counts(p: ModelParams, cfg: PathConfig, intensity: np.ndarray, entropy=None) -> np.ndarray:
    """Per-day counts from exponential durations raced against the intensity.

    Durations are i.i.d. with mean ``1/lam``; the day-``k`` count is the
    number of duration partial sums not exceeding ``intensity[k] / lam``
    (the cumulative intensity mapped to the durations' operational time),
    so conditionally on the intensity the counts are Poisson with mean
    increments ``intensity[k] - intensity[k-1]``.
    """
    if np.any(np.diff(intensity) < 0) or (len(intensity) and intensity[0] < 0):
        raise ValueError("cumulative intensity must be nonnegative and nondecreasing")
    # Durations have mean 1/lam; racing their partial sums against
    # intensity/lam is identical to racing mean-one exponentials against the
    # intensity itself, so the lam factors cancel exactly.
    thresholds = np.asarray(intensity, dtype=float)
    rng = rng_for(entropy if entropy is not None else cfg.seed, STREAM_DURATIONS)
    cap = cfg.duration_pool
    if cap <= 0:
        cap = int(8.0 * thresholds[-1]) + 1_000_000 if len(thresholds) else 1_000_000

    n_days = len(thresholds)
    n_cum = np.empty(n_days, dtype=np.int64)
    drawn = 0
    resolved = 0
    offset = 0.0
    base = 0
    while resolved < n_days:
        take = min(_DURATION_BLOCK, cap - drawn)
        if take <= 0:
            raise DurationPoolExhausted(
                f"more than {cap} exponential durations needed; raise duration_pool"
            )
        block = np.cumsum(rng.standard_exponential(take))
        block += offset
        done = int(np.searchsorted(thresholds, block[-1], side="right"))
        if done > resolved:
            n_cum[resolved:done] = base + np.searchsorted(
                block, thresholds[resolved:done], side="right"
            )
            resolved = done
        drawn += take
        offset = float(block[-1])
        base += take
    return np.diff(n_cum, prepend=0)


def _assemble_series(p, cfg, counts, shock_rng, drift):
    shock_scale = p.sigma_e * np.sqrt(counts.astype(float))
    shocks = shock_scale * shock_rng.standard_normal(len(counts))
    log_price = drift * np.cumsum(counts) + np.cumsum(shocks)
    returns = np.diff(log_price, prepend=0.0)
    return returns, log_price


def simulate_path(p: ModelParams, cfg: PathConfig) -> DailySeries:
    """One full daily path: ``log P(k) = mu N(k) + sum of the first N(k) shocks``."""
    intensity = simulate_intensity(p, cfg)
    counts = simulate_counts(p, cfg, intensity)
    returns, log_price = _assemble_series(p, cfg, counts, rng_for(cfg.seed, STREAM_SHOCKS), p.mu)
    return DailySeries(counts, returns, log_price, params=p, config=cfg)


def simulate_two_shock_path(p1: ModelParams, p2: ModelParams, cfg: PathConfig) -> DailySeries:
    """Buy/sell two-process path: ``log P = mu1 N1 + mu2 N2 +`` both shock sums.

    The processes are independent Cox processes with their own intensities and
    shock streams, derived from disjoint sub-seeds of the path seed.  Requires
    ``mu1 > 0``, ``mu2 <= 0`` and ``mu1 + mu2 > 0``; counts in the combined
    series are the total transactions ``N1 + N2``.
    """
    if not (p1.mu > 0 and p2.mu <= 0 and p1.mu + p2.mu > 0):
        raise InvalidDriftPair(
            f"need mu1 > 0, mu2 <= 0 and mu1 + mu2 > 0, got {p1.mu}, {p2.mu}"
        )
    log_price = None
    counts_total = None
    for side, p in enumerate((p1, p2)):
        entropy = (cfg.seed, side)
        intensity = simulate_intensity(p, cfg, entropy=entropy)
        counts = simulate_counts(p, cfg, intensity, entropy=entropy)
        _, lp = _assemble_series(p, cfg, counts, rng_for(entropy, STREAM_SHOCKS), p.mu)
        log_price = lp if log_price is None else log_price + lp
        counts_total = counts if counts_total is None else counts_total + counts
    returns = np.diff(log_price, prepend=0.0)
    return DailySeries(counts_total, returns, log_price, params=None, config=cfg)
