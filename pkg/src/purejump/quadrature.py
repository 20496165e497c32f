"""Gauss-Legendre quadrature for the nested exp-autocovariance integrals.

Every integral lives on a power of the unit cube ``[-1, 0]^k``.  Because the
integrands depend on the coordinates only through pairwise differences, each
one collapses to a lower-dimensional integral over difference variables with a
piecewise-linear fiber-length weight.  The reduced domains are partitioned
into cells along every kink line of the kernel (the ``d = 0`` autocovariance
is piecewise linear; for ``d > 0`` the same loci carry mild cusps), and each
cell is integrated with a tensor Gauss-Legendre rule, which keeps the result
stable far beyond the doubling tolerances:

* double integrals  -> weighted 1-D integral over the lag difference,
* triple integrals  -> 2-D cell integration over two difference variables,
* quadruple integrals -> 1-D composite outer integral times 2-D cells.

Cells on which the integrand vanishes identically (outside the fiber support,
or where the piecewise kernel is exactly zero) are dropped, so short-memory
covariances beyond the dependence lag come out as exact zeros.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .fgn import GammaSpec, gamma_z

DEFAULT_NODES_1D = 64
DEFAULT_NODES_3D = 32
DEFAULT_NODES_4D = 20

E = float(np.e)
SQRT_E = float(np.exp(0.5))

_EPS = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on the interval ``[-1, 0]``."""

    nodes_per_axis: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to the interval length 1")
        if np.any(np.diff(self.nodes) <= 0) or self.nodes[0] <= -1 or self.nodes[-1] >= 0:
            raise ValueError("nodes must be strictly increasing and interior to [-1, 0]")


def gauss_legendre_rule(n: int) -> QuadratureRule:
    """Order-``n`` Gauss-Legendre rule mapped from [-1, 1] onto [-1, 0]."""
    x, w = leggauss(n)
    return QuadratureRule(n, (x - 1.0) / 2.0, w / 2.0)


_RULE_CACHE: dict = {}


def _rule(n: int) -> QuadratureRule:
    rule = _RULE_CACHE.get(n)
    if rule is None:
        rule = _RULE_CACHE[n] = gauss_legendre_rule(n)
    return rule


_GL01_CACHE: dict = {}


def _gl01(n: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    got = _GL01_CACHE.get(n)
    if got is None:
        x, w = leggauss(n)
        got = _GL01_CACHE[n] = ((x + 1.0) / 2.0, w / 2.0)
    return got


def integrate_1d(f, rule: QuadratureRule | None = None) -> float:
    """Gauss-Legendre estimate of the integral of ``f`` over [-1, 0]."""
    rule = rule or _rule(DEFAULT_NODES_1D)
    return float(np.sum(rule.weights * np.asarray(f(rule.nodes), dtype=float)))


# --------------------------------------------------------------------------
# 1-D reduction of the double integrals
# --------------------------------------------------------------------------

def _breakpoints(spec: GammaSpec, L: float) -> np.ndarray:
    """Kink locations of u -> (1-|u|)(e^{gamma(L+u)}-1) inside (-1, 1)."""
    pts = {0.0, -L, -L - 1.0 / spec.c, -L + 1.0 / spec.c}
    inner = sorted(p for p in pts if -1.0 < p < 1.0)
    return np.array([-1.0, *inner, 1.0])


def weighted_lag_integral(spec: GammaSpec, L: float, rule: QuadratureRule | None = None) -> float:
    """The double integral of ``e^{gamma(L + t - s)} - 1`` over ``[-1, 0]^2``.

    Computed as ``int_{-1}^{1} (1 - |u|) (e^{gamma(L + u)} - 1) du`` with the
    domain split at the kernel kinks.  Equals ``cov(A_L, A_0) / e`` where
    ``A_L`` is the integrated intensity shape over day ``L``.
    """
    rule = rule or _rule(DEFAULT_NODES_1D)
    edges = _breakpoints(spec, L)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        u = a + (rule.nodes + 1.0) * (b - a)
        g = (1.0 - np.abs(u)) * np.expm1(gamma_z(spec, L + u))
        total += (b - a) * float(np.sum(rule.weights * g))
    return total


def exp_gamma_square_integral(spec: GammaSpec, rule: QuadratureRule | None = None) -> float:
    """``int int e^{gamma(t - s)} dt ds`` over the unit square (equals 1 + wli(0))."""
    return 1.0 + weighted_lag_integral(spec, 0.0, rule)


# --------------------------------------------------------------------------
# 2-D cell integration: rectangles cut by one family of slope +-1 diagonals
# --------------------------------------------------------------------------

def _clip_halfplane(poly, nx, ny, c):
    """Keep the part of a convex polygon with ``nx*x + ny*y <= c``."""
    out = []
    n = len(poly)
    for i in range(n):
        p = poly[i]
        q = poly[(i + 1) % n]
        dp = nx * p[0] + ny * p[1] - c
        dq = nx * q[0] + ny * q[1] - c
        if dp <= _EPS:
            out.append(p)
        if (dp < -_EPS and dq > _EPS) or (dp > _EPS and dq < -_EPS):
            t = dp / (dp - dq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _cells(xcuts, ycuts, sigma, dcuts):
    """Convex cells of the grid made from x/y cuts and diagonals x - sigma*y = d."""
    polys = []
    dvals = sorted(dcuts)
    for x0, x1 in zip(xcuts[:-1], xcuts[1:]):
        for y0, y1 in zip(ycuts[:-1], ycuts[1:]):
            rect = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
            corners_g = [x - sigma * y for x, y in rect]
            inner = [d for d in dvals if min(corners_g) + _EPS < d < max(corners_g) - _EPS]
            if not inner:
                polys.append(rect)
                continue
            edges = [min(corners_g), *inner, max(corners_g)]
            for glo, ghi in zip(edges[:-1], edges[1:]):
                poly = _clip_halfplane(rect, -1.0, sigma, -glo)   # g >= glo
                if len(poly) >= 3:
                    poly = _clip_halfplane(poly, 1.0, -sigma, ghi)  # g <= ghi
                if len(poly) >= 3:
                    polys.append(poly)
    return polys


def _integrate_cells(f, xcuts, ycuts, sigma, dcuts, order: int) -> float:
    """Integrate ``f(x, y)`` over the cut rectangle grid, cell by cell.

    ``f`` must be vectorized and exactly zero wherever it vanishes on a whole
    cell; such cells are pruned after a midpoint probe (valid because every
    support edge and kink line is a cut).
    """
    tri0, tri1, tri2 = [], [], []
    for poly in _cells(xcuts, ycuts, sigma, dcuts):
        for i in range(1, len(poly) - 1):
            tri0.append(poly[0])
            tri1.append(poly[i])
            tri2.append(poly[i + 1])
    if not tri0:
        return 0.0
    v0 = np.asarray(tri0)
    v1 = np.asarray(tri1)
    v2 = np.asarray(tri2)
    cross = (v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v1[:, 1] - v0[:, 1]) * (
        v2[:, 0] - v0[:, 0]
    )
    keep = np.abs(cross) > 1e-13
    if not np.any(keep):
        return 0.0
    v0, v1, v2, cross = v0[keep], v1[keep], v2[keep], cross[keep]

    centroid = (v0 + v1 + v2) / 3.0
    active = np.asarray(f(centroid[:, 0], centroid[:, 1])) != 0.0
    if not np.any(active):
        return 0.0
    v0, v1, v2, cross = v0[active], v1[active], v2[active], cross[active]

    x, wx = _gl01(order)
    # Duffy map: P = v0 + x (v1 - v0) + x y (v2 - v1), Jacobian x |cross|.
    xg = x[:, None]
    yg = x[None, :]
    ax = (
        v0[:, None, None, 0]
        + xg * (v1[:, 0] - v0[:, 0])[:, None, None]
        + (xg * yg) * (v2[:, 0] - v1[:, 0])[:, None, None]
    )
    ay = (
        v0[:, None, None, 1]
        + xg * (v1[:, 1] - v0[:, 1])[:, None, None]
        + (xg * yg) * (v2[:, 1] - v1[:, 1])[:, None, None]
    )
    wgt = np.abs(cross)[:, None, None] * (wx[:, None] * wx[None, :]) * xg
    vals = np.asarray(f(ax.ravel(), ay.ravel()))
    return float(np.dot(vals, wgt.ravel()))


def _inner_cuts(values, lo, hi):
    out = {lo, hi}
    for v in values:
        if lo + _EPS < v < hi - _EPS:
            out.add(float(v))
    return sorted(out)


# --------------------------------------------------------------------------
# Triple integral: cov(A_L, B_0) / e^{3/2}
# --------------------------------------------------------------------------

def integrate_3d_ALB0(spec: GammaSpec, L: float, rule: QuadratureRule | None = None) -> float:
    """Triple integral of ``e^{g(t-u)} [e^{g(s-t+L) + g(s-u+L)} - 1]`` on ``[-1,0]^3``.

    Reduced over ``a = s - t``, ``b = s - u``; the fiber in ``s`` has length
    ``(1 - max(|a|, |b|, |a - b|))^+`` and the integrand is constant along it.
    Equals ``cov(A_L, B_0) / e^{3/2}``.
    """
    order = (rule or _rule(DEFAULT_NODES_3D)).nodes_per_axis
    inv_c = 1.0 / spec.c

    def f(a, b):
        w = 1.0 - np.maximum(np.maximum(np.abs(a), np.abs(b)), np.abs(a - b))
        np.maximum(w, 0.0, out=w)
        return w * np.exp(gamma_z(spec, b - a)) * np.expm1(
            gamma_z(spec, L + a) + gamma_z(spec, L + b)
        )

    axis = _inner_cuts([0.0, -L, -L - inv_c, -L + inv_c], -1.0, 1.0)
    diag = [0.0, inv_c, -inv_c, 1.0, -1.0]
    return _integrate_cells(f, axis, axis, 1.0, diag, order)


# --------------------------------------------------------------------------
# Quadruple integrals: outer composite 1-D times 2-D cells
# --------------------------------------------------------------------------

def _composite_segments(breaks, lo, hi):
    edges = _inner_cuts(breaks, lo, hi)
    return list(zip(edges[:-1], edges[1:]))


def integrate_4d_B0BL(spec: GammaSpec, L: float, rule: QuadratureRule | None = None) -> float:
    """Quadruple integral for the squared-intensity covariance at lag ``L``.

    Integrand ``e^{g(s-t)} e^{g(u-v)} [e^{g(L+s-v)+g(L+s-u)+g(L+t-v)+g(L+t-u)} - 1]``
    over ``[-1, 0]^4``; equals ``cov(B_L, B_0) / e^2``.  Reduced over
    ``a = s - t``, ``b = u - v``, ``e = s - u`` with a length-``W`` fiber in s.
    """
    order = (rule or _rule(DEFAULT_NODES_4D)).nodes_per_axis
    inv_c = 1.0 / spec.c

    def make_inner(ev):
        def f(a, b):
            top = np.maximum(np.maximum(a, ev), np.maximum(ev + b, 0.0))
            bot = np.minimum(np.minimum(a, ev), np.minimum(ev + b, 0.0))
            w = np.maximum(1.0 - (top - bot), 0.0)
            total = (
                gamma_z(spec, L + ev)
                + gamma_z(spec, L + ev + b)
                + gamma_z(spec, L + ev - a)
                + gamma_z(spec, L + ev - a + b)
            )
            return w * np.exp(gamma_z(spec, a) + gamma_z(spec, b)) * np.expm1(total)

        return f

    shifts = (0.0, inv_c, -inv_c)
    e_breaks = [s + k for s in (0.0, *[-L + sh for sh in shifts], *shifts, 2 * inv_c, -2 * inv_c)
                for k in (-1.0, 0.0, 1.0)]
    xnod, xwgt = _gl01(order)
    total = 0.0
    for e_lo, e_hi in _composite_segments(e_breaks, -1.0, 1.0):
        width = e_hi - e_lo
        for node, wgt in zip(xnod, xwgt):
            ev = e_lo + node * width
            acuts = _inner_cuts(
                [0.0, inv_c, -inv_c, L + ev, L + ev - inv_c, L + ev + inv_c, ev, ev - 1, ev + 1],
                -1.0, 1.0,
            )
            bcuts = _inner_cuts(
                [0.0, inv_c, -inv_c, -L - ev, -L - ev - inv_c, -L - ev + inv_c,
                 -ev, -ev - 1, -ev + 1],
                -1.0, 1.0,
            )
            dcuts = [L + ev, L + ev - inv_c, L + ev + inv_c, ev, ev - 1, ev + 1]
            inner = _integrate_cells(make_inner(ev), acuts, bcuts, 1.0, dcuts, order)
            total += width * wgt * inner
    return total


def integrate_nu_moments(
    spec: GammaSpec,
    lam: float,
    rule2: QuadratureRule | None = None,
    rule3: QuadratureRule | None = None,
    rule4: QuadratureRule | None = None,
):
    """First four moments of the conditional day-count mean ``nu``.

    ``nu = lam * int_{t-1}^{t} e^{Z(s)} ds``; the p-th moment is ``lam^p
    e^{p/2}`` times the p-fold integral of ``exp(sum of pairwise gamma)``.
    The 3- and 4-fold integrals are reduced to ordered difference variables
    ``x, y(, z) >= 0`` with fiber weight ``(1 - x - y(- z))^+``.
    Returns ``(E[nu], E[nu^2], E[nu^3], E[nu^4])``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    inv_c = 1.0 / spec.c
    e1 = lam * SQRT_E
    e2 = lam**2 * E * exp_gamma_square_integral(spec, rule2)

    order3 = (rule3 or _rule(DEFAULT_NODES_3D)).nodes_per_axis

    def f3(x, y):
        w = np.maximum(1.0 - x - y, 0.0)
        return w * np.exp(gamma_z(spec, x) + gamma_z(spec, y) + gamma_z(spec, x + y))

    cuts = _inner_cuts([inv_c], 0.0, 1.0)
    t3 = 6.0 * _integrate_cells(f3, cuts, cuts, -1.0, [inv_c, 1.0], order3)
    e3 = lam**3 * np.exp(1.5) * t3

    order4 = (rule4 or _rule(DEFAULT_NODES_4D)).nodes_per_axis
    xnod, xwgt = _gl01(order4)
    z_breaks = [j * inv_c + k for j in (0, 1, 2) for k in (-1.0, 0.0, 1.0)]
    t4 = 0.0
    for z_lo, z_hi in _composite_segments(z_breaks, 0.0, 1.0):
        width = z_hi - z_lo
        for node, wgt in zip(xnod, xwgt):
            zv = z_lo + node * width

            def f4(x, y, _z=zv):
                w = np.maximum(1.0 - x - y - _z, 0.0)
                total = (
                    gamma_z(spec, x)
                    + gamma_z(spec, y)
                    + gamma_z(spec, _z)
                    + gamma_z(spec, x + y)
                    + gamma_z(spec, y + _z)
                    + gamma_z(spec, x + y + _z)
                )
                return w * np.exp(total)

            xc = _inner_cuts([inv_c], 0.0, 1.0)
            yc = _inner_cuts([inv_c, inv_c - zv], 0.0, 1.0)
            dc = [inv_c, inv_c - zv, 1.0 - zv]
            t4 += width * wgt * _integrate_cells(f4, xc, yc, -1.0, dc, order4)
    t4 *= 24.0
    e4 = lam**4 * E**2 * t4
    return e1, float(e2), float(e3), float(e4)
