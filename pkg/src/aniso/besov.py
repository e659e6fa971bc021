"""Fractional-regularity instrumentation.

Difference-quotient L^p norms over grid-snapped offsets, the max-over-
offsets seminorm (a finite lower bound for the essential sup), the
Gagliardo double sum, log-log scaling-exponent fits, and the uniform
regularity ratio used to compare minimizer families across eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, VectorField2D
from .operators import divergence, finite_difference


def inset_mask(grid: Grid2D, margin: float) -> np.ndarray:
    """Nodes at least ``margin`` inside the non-periodic domain edges."""
    ok = np.ones(grid.shape, dtype=bool)
    if margin <= 0:
        return ok
    if not grid.periodic_x1:
        x = grid.x
        ok &= ((x >= x[0] + margin) & (x <= x[-1] - margin))[:, None]
    if not grid.periodic_x2:
        y = grid.y
        ok &= ((y >= y[0] + margin) & (y <= y[-1] - margin))[None, :]
    return ok


def lp_difference_norm(u: VectorField2D, k: tuple[int, int], p: float,
                       margin: float = 0.0) -> float:
    """``|| D^h u ||_{L^p}`` over the margin-inset intersection mask."""
    if p <= 0:
        raise ValueError("p must be positive")
    d = finite_difference(u, k)
    m = d.mask & inset_mask(u.grid, margin)
    if not np.any(m):
        raise ValueError("empty intersection mask for this offset/margin")
    mags = np.hypot(d.u1[m], d.u2[m])
    w = u.grid.hx * u.grid.hy
    return float((w * np.sum(mags ** p)) ** (1.0 / p))


def besov_seminorm(u: VectorField2D, s: float, p: float,
                   offsets: list[tuple[int, int]],
                   margin: float | None = None) -> float:
    """Max difference quotient over the finite offset set (a lower bound
    for the continuum sup over h)."""
    return max(q for *_rest, q in besov_scan(u, s, p, offsets, margin))


def besov_scan(u: VectorField2D, s: float, p: float,
               offsets: list[tuple[int, int]],
               margin: float | None = None
               ) -> list[tuple[float, float, float, float, float, float]]:
    """Per-offset rows ``(p, s, h1, h2, norm, quotient)``.

    ``margin=None`` uses twice the largest offset length.
    """
    if margin is None:
        margin = default_margin(u.grid, offsets)
    rows = []
    for k in offsets:
        if k == (0, 0):
            raise ValueError("offsets must be nonzero")
        hlen = u.grid.offset_length(k)
        norm = lp_difference_norm(u, k, p, margin)
        rows.append((p, s, k[0] * u.grid.hx, k[1] * u.grid.hy,
                     norm, norm / hlen ** s))
    return rows


def dyadic_offsets(grid: Grid2D, direction: tuple[int, int] = (1, 0),
                   k_range: range = range(2, 9)) -> list[tuple[int, int]]:
    """Offsets with length ``L / 2^k`` along a direction, snapped to nodes
    (L is the x1 half-width, so the default margin below stays feasible);
    degenerate snaps are dropped."""
    span = grid.lx
    dlen = math.hypot(direction[0] * grid.hx, direction[1] * grid.hy)
    out = []
    for k in k_range:
        mult = round(span / 2 ** k / dlen)
        if mult >= 1:
            off = (direction[0] * mult, direction[1] * mult)
            if off not in out:
                out.append(off)
    return out


def default_offsets(grid: Grid2D, k_range: range = range(2, 9)) -> list[tuple[int, int]]:
    """Dyadic magnitudes along e1, e2, and the snapped diagonal."""
    out: list[tuple[int, int]] = []
    for d in ((1, 0), (0, 1), (1, 1)):
        for off in dyadic_offsets(grid, d, k_range):
            if off not in out:
                out.append(off)
    return out


def default_margin(grid: Grid2D, offsets: list[tuple[int, int]]) -> float:
    """Twice the largest offset length, emulating a compactly contained
    subdomain."""
    return 2.0 * max(grid.offset_length(k) for k in offsets)


@dataclass(frozen=True)
class FitResult:
    alpha: float | None
    r2: float | None
    n_scales: int
    defined: bool = True


def scaling_exponent(u: VectorField2D, p: float,
                     offsets: list[tuple[int, int]],
                     margin: float | None = None) -> FitResult:
    """Least-squares slope of ``log ||D^h u||_p`` against ``log |h|``.

    ``margin=None`` uses twice the largest offset length.
    """
    if margin is None:
        margin = default_margin(u.grid, offsets)
    lens, norms = [], []
    for k in offsets:
        norms.append(lp_difference_norm(u, k, p, margin))
        lens.append(u.grid.offset_length(k))
    lens = np.asarray(lens)
    norms = np.asarray(norms)
    keep = norms > 0
    if not np.any(keep):
        return FitResult(None, None, 0, defined=False)
    if int(np.sum(keep)) < 4:
        raise ValueError("scaling fit needs at least 4 scales with nonzero norms")
    lx = np.log(lens[keep])
    ly = np.log(norms[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), r2, int(np.sum(keep)))


def gagliardo_seminorm(u: VectorField2D, s: float, p: float, margin: float = 0.0,
                       pair_plan: tuple[int, int] | None = None) -> float:
    """The Gagliardo double sum ``sum |u(x)-u(y)|^p / |x-y|^{2+sp} w^2``
    (the p-th power of the seminorm) over distinct masked node pairs.

    Small grids are summed exactly (order-independent exact rounding via
    fsum); larger grids require a seeded ``pair_plan = (seed, n_pairs)``
    and return an unbiased subsampled estimate.
    """
    g = u.grid
    m = u.mask & inset_mask(g, margin)
    xs, ys = g.meshgrid()
    px = xs[m]
    py = ys[m]
    c1 = u.u1[m]
    c2 = u.u2[m]
    n = px.size
    w2 = (g.hx * g.hy) ** 2
    expo = 2.0 + s * p
    if n <= 1024:
        terms = []
        for i in range(n):
            dx = px[i] - px
            dy = py[i] - py
            dist = np.hypot(dx, dy)
            dist[i] = 1.0
            du = np.hypot(c1[i] - c1, c2[i] - c2)
            t = du ** p / dist ** expo
            t[i] = 0.0
            terms.append(t)
        return w2 * math.fsum(np.concatenate(terms).tolist())
    if pair_plan is None:
        raise ValueError("grids beyond 1024 masked nodes need a seeded pair_plan")
    seed, n_pairs = pair_plan
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n, size=n_pairs)
    jj = rng.integers(0, n, size=n_pairs)
    keep = ii != jj
    ii, jj = ii[keep], jj[keep]
    du = np.hypot(c1[ii] - c1[jj], c2[ii] - c2[jj])
    dist = np.hypot(px[ii] - px[jj], py[ii] - py[jj])
    mean_term = float(np.mean(du ** p / dist ** expo))
    return w2 * mean_term * n * (n - 1)


def regularity_ratio(u: VectorField2D, eps: float, margin: float,
                     offsets: list[tuple[int, int]] | None = None) -> float:
    """Empirical constant ``sup_h ||D^h u||_{L^3(inset)} /
    ((1 + ||div u||_{L^2})^{1/2} |h|^{1/2})``.

    ``eps`` tags the field's energy parameter for reporting; the bound
    itself is eps-free, which is what the cross-eps comparison probes.
    The divergence is the centered diagnostic on the full domain; the
    differences live on the margin-inset subdomain.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    g = u.grid
    if offsets is None:
        offsets = default_offsets(g)
    dv = divergence(u)
    w = g.hx * g.hy
    div_l2 = math.sqrt(w * float(np.sum(dv.values[dv.mask] ** 2)))
    denom_base = math.sqrt(1.0 + div_l2)
    best = 0.0
    for k in offsets:
        hlen = g.offset_length(k)
        norm = lp_difference_norm(u, k, 3.0, margin)
        best = max(best, norm / (denom_base * math.sqrt(hlen)))
    return best
