"""Closed-form population moments of counts, returns and squared returns.

All formulas condition on the intensity path and reduce to the integrals of
``exp(gamma)`` computed in :mod:`purejump.quadrature`:

* ``cov(A_L, A_0) = e   * wli(L)``   (integrated-intensity covariance),
* ``cov(A_L, B_0) = e^{3/2} * I3(L)``,
* ``cov(B_L, B_0) = e^2 * I4(L)``,

with ``A_L`` the integrated intensity shape over day ``L`` and ``B_L`` its
square.  For ``d = 0`` the day-level series are h-dependent, with ``h``
determined by the time scale ``c``; every covariance beyond the dependence
lag is exactly zero.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeVariance
from .fgn import GammaSpec, gamma_z
from .quadrature import (
    E,
    SQRT_E,
    QuadratureRule,
    exp_gamma_square_integral,
    integrate_3d_ALB0,
    integrate_4d_B0BL,
    integrate_nu_moments,
    weighted_lag_integral,
)

# Beyond this lag the exact quadrature is swapped for the slow-variation
# asymptote const * gamma_z(L); accurate to well under 1% there for d <= 0.45.
ASYMPTOTE_LAG = 200


@dataclass(frozen=True)
class ModelParams:
    """Generative parameters: drift, baseline intensity, shock scale, memory."""

    mu: float
    lam: float
    sigma_e: float
    gamma: GammaSpec

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"baseline intensity lam must be positive, got {self.lam}")
        if self.sigma_e < 0:
            raise ValueError(f"shock scale sigma_e must be nonnegative, got {self.sigma_e}")

    @property
    def c(self) -> float:
        return self.gamma.c

    @property
    def d(self) -> float:
        return self.gamma.d


def compute_h(c: float) -> int:
    """Dependence lag of the daily series under ``d = 0`` for time scale ``c``."""
    if not c > 0:
        raise ValueError("c must be positive")
    if c < 1.0:
        return int(math.floor(1.0 / c)) + 1
    return max(int(math.floor(1.0 / c - 1.0)) + 1, 1)


def mean_count(p: ModelParams) -> float:
    """``E[dN] = lam * e^{1/2}``."""
    return p.lam * SQRT_E


def mean_return(p: ModelParams) -> float:
    """``E[r] = mu * lam * e^{1/2}``."""
    return p.mu * p.lam * SQRT_E


def _cov_a0al(p: ModelParams, L: int, rule: QuadratureRule | None = None) -> float:
    if p.d > 0 and L > ASYMPTOTE_LAG:
        return E * gamma_z(p.gamma, L)
    return E * weighted_lag_integral(p.gamma, float(L), rule)


def _cov_a0bl(p: ModelParams, L: int, rule: QuadratureRule | None = None) -> float:
    if p.d > 0 and L > ASYMPTOTE_LAG:
        return 2.0 * E**1.5 * gamma_z(p.gamma, L) * exp_gamma_square_integral(p.gamma)
    return E**1.5 * integrate_3d_ALB0(p.gamma, float(L), rule)


def _cov_b0bl(p: ModelParams, L: int, rule: QuadratureRule | None = None) -> float:
    if p.d > 0 and L > ASYMPTOTE_LAG:
        return 4.0 * E**2 * gamma_z(p.gamma, L) * exp_gamma_square_integral(p.gamma) ** 2
    return E**2 * integrate_4d_B0BL(p.gamma, float(L), rule)


def cov_counts(p: ModelParams, L: int) -> float:
    """Lag-``L`` autocovariance of the daily counts, ``L >= 1``."""
    return p.lam**2 * _cov_a0al(p, L)


def var_counts(p: ModelParams) -> float:
    """Variance of the daily counts (lag-0 term plus the Poisson layer)."""
    return p.lam**2 * _cov_a0al(p, 0) + p.lam * SQRT_E


def cov_returns(p: ModelParams, L: int) -> float:
    """Lag-``L`` autocovariance of the daily returns, ``L >= 1``."""
    return p.mu**2 * p.lam**2 * _cov_a0al(p, L)


def var_return(p: ModelParams) -> float:
    """``var(r) = mu^2 lam^2 cov(A_0, A_0) + lam e^{1/2} (mu^2 + sigma_e^2)``."""
    return p.mu**2 * p.lam**2 * _cov_a0al(p, 0) + p.lam * SQRT_E * (p.mu**2 + p.sigma_e**2)


def cov_return_sqreturn(p: ModelParams, L: int) -> float:
    """``cov(r_L, r_0^2)`` for ``L >= 1``; strictly positive whenever ``mu > 0``."""
    a = _cov_a0al(p, L)
    b = _cov_a0bl(p, L)
    return p.mu**3 * (p.lam**3 * b + p.lam**2 * a) + p.mu * p.sigma_e**2 * p.lam**2 * a


def cov_return_sqreturn_two_shock(
    mu1: float, mu2: float, lam: float, sigma_e: float, gamma: GammaSpec, L: int
) -> float:
    """``cov(r_0, r_L^2)`` for the buy/sell two-drift model with common ``lam``.

    Requires ``mu1 > 0 >= mu2`` and ``mu1 + mu2 > 0``; positive for every
    ``L >= 1`` because ``mu1^3 + mu2^3 > 0`` and the mixed coefficient
    ``(mu1 + mu2)(mu1^2 + mu1 mu2 + mu2^2)`` is positive as well.
    """
    p = ModelParams(mu1, lam, sigma_e, gamma)
    a = _cov_a0al(p, L)
    b = _cov_a0bl(p, L)
    mix = (mu1 + mu2) * (mu1**2 + mu1 * mu2 + mu2**2)
    return (
        mix * lam**3 * b
        + (mu1**3 + mu2**3) * lam**2 * a
        + 2.0 * (mu1 + mu2) * lam**2 * sigma_e**2 * a
    )


def cov_sqreturns(p: ModelParams, L: int) -> float:
    """``cov(r_0^2, r_L^2)`` for ``L >= 1``."""
    a = _cov_a0al(p, L)
    b = _cov_a0bl(p, L)
    q = _cov_b0bl(p, L)
    m2 = p.mu**2 + p.sigma_e**2
    return m2**2 * p.lam**2 * a + 2.0 * p.mu**2 * p.lam**3 * m2 * b + p.mu**4 * p.lam**4 * q


def var_sqreturn(p: ModelParams) -> float:
    """``var(r^2)`` assembled from the conditional-mean moments ``E[nu^k]``.

    The shock layer is Gaussian, so conditionally on ``n`` transactions the
    return is ``mu n + N(0, n sigma_e^2)`` and
    ``E[r^4] = mu^4 E[n^4] + 6 mu^2 sigma^2 E[n^3] + 3 sigma^4 E[n^2]``.
    """
    e1, e2, e3, e4 = integrate_nu_moments(p.gamma, p.lam)
    en2 = e1 + e2
    en3 = e1 + 3.0 * e2 + e3
    en4 = e1 + 7.0 * e2 + 6.0 * e3 + e4
    s2 = p.sigma_e**2
    er4 = p.mu**4 * en4 + 6.0 * p.mu**2 * s2 * en3 + 3.0 * s2**2 * en2
    vr = var_return(p)
    er = mean_return(p)
    out = er4 - vr**2 - 2.0 * er**2 * vr - er**4
    if out <= 0:
        raise NegativeVariance(f"assembled var(r^2) = {out:.3e} <= 0; check quadrature setup")
    return out


def cov_aggregated_returns(p: ModelParams, h_tilde: int, m: int, L: int) -> float:
    """``cov(R_{t,t+H}, R_{t+L,t+L+H})`` of ``H``-month aggregated returns, d = 0.

    Exact finite sum ``sum_k (Hm - |k - Lm|)^+ gamma_r(k)`` over the lags the
    two day windows can realize; requires ``0 < L <= H`` and short memory.
    """
    if p.d != 0.0:
        raise ValueError("closed form requires the short-memory case d = 0")
    if not (0 < L <= h_tilde):
        raise ValueError("need 0 < L <= h_tilde")
    h = compute_h(p.c)
    n = h_tilde * m
    center = L * m
    vr = var_return(p)
    cov = {k: cov_returns(p, k) for k in range(1, h + 1)}
    total = 0.0
    for k in range(max(-h, center - n + 1), min(h, center + n - 1) + 1):
        weight = n - abs(k - center)
        if weight > 0:
            total += weight * (vr if k == 0 else cov[abs(k)])
    return total


def rho_limit(d: float) -> float:
    """Large-horizon limit ``2^{2d} - 1`` of the return/realized-variance correlation."""
    return 2.0 ** (2.0 * d) - 1.0


@dataclass(frozen=True)
class MomentTable:
    """Moment ingredients for the normalized correlation statistic.

    ``a1 = var(r) + 2 sum_{k<=h} cov(r_0, r_k)``, ``a2`` the squared-return
    analog, and ``s2 = (2/3) sum_{|u|<=h} sum_{|v|<=h} cov(r_0,r_u)
    cov(r_0^2, r_v^2)``, which factorizes to ``(2/3) a1 a2``.
    """

    h: int
    var_r: float
    var_r2: float
    cov_r: np.ndarray
    cov_r2: np.ndarray
    cov_r_r2: np.ndarray
    a1: float
    a2: float
    s2: float

    @property
    def variance_ratio(self) -> float:
        """``s2 / (a1 a2)``, the null variance of the rescaled statistic."""
        return self.s2 / (self.a1 * self.a2)


def moment_table(p: ModelParams, m: int, h_max: int | None = None) -> MomentTable:
    """Assemble the lag table and the normalization ingredients.

    ``m`` (days per month) does not enter the entries themselves; the month
    scalings cancel between the numerator and denominator of the statistic.
    Lag lists run to ``max(h, h_max)``; the sums in ``a1``, ``a2`` stop at
    ``h`` per the h-dependence of the short-memory case.
    """
    h = compute_h(p.c)
    n_lags = max(h, h_max or 0)
    vr = var_return(p)
    vr2 = var_sqreturn(p)
    cov_r = np.array([cov_returns(p, k) for k in range(1, n_lags + 1)])
    cov_r2 = np.array([cov_sqreturns(p, k) for k in range(1, n_lags + 1)])
    cov_r_r2 = np.array([cov_return_sqreturn(p, k) for k in range(1, n_lags + 1)])
    a1 = vr + 2.0 * float(cov_r[:h].sum())
    a2 = vr2 + 2.0 * float(cov_r2[:h].sum())
    s2 = 0.0
    for u in range(-h, h + 1):
        cu = vr if u == 0 else cov_r[abs(u) - 1]
        for v in range(-h, h + 1):
            cv = vr2 if v == 0 else cov_r2[abs(v) - 1]
            s2 += cu * cv
    s2 *= 2.0 / 3.0
    return MomentTable(h, vr, vr2, cov_r, cov_r2, cov_r_r2, a1, a2, s2)
