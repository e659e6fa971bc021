"""First-order discrete differential operators.

Two families of stencils are used deliberately:

* diagnostic ``divergence``/``curl``: centered second-order differences
  on interior nodes, one-sided second-order at non-periodic boundaries,
  wrap-around where an axis is periodic;
* the energy quadrature: forward differences averaged over the four
  corners of each grid cell (``cell_diffs``), whose exact adjoint
  (``scatter_to_nodes``) makes the energy gradient pure algebra.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid2D, ScalarField2D, VectorField2D


def _axis_derivative(f: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    if periodic:
        out = (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2.0 * h)
    else:
        if n < 3:
            raise ValueError("centered stencil needs at least 3 nodes per axis")
        out = np.empty_like(f)
        out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
        out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def _axis_eroded_mask(mask: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    m = np.moveaxis(mask, axis, 0)
    out = np.zeros_like(m)
    if periodic:
        out[:] = m & np.roll(m, 1, axis=0) & np.roll(m, -1, axis=0)
    else:
        out[1:-1] = m[1:-1] & m[2:] & m[:-2]
        out[0] = m[0] & m[1] & m[2]
        out[-1] = m[-1] & m[-2] & m[-3]
    return np.moveaxis(out, 0, axis)


def _diagnostic_mask(u: VectorField2D) -> np.ndarray:
    g = u.grid
    return (_axis_eroded_mask(u.mask, 0, g.periodic_x1)
            & _axis_eroded_mask(u.mask, 1, g.periodic_x2))


def divergence(u: VectorField2D) -> ScalarField2D:
    """Centered ``d1 u1 + d2 u2``; the mask shrinks to fully resolved stencils."""
    g = u.grid
    vals = (_axis_derivative(u.u1, g.hx, 0, g.periodic_x1)
            + _axis_derivative(u.u2, g.hy, 1, g.periodic_x2))
    return ScalarField2D(g, vals, _diagnostic_mask(u))


def curl(u: VectorField2D) -> ScalarField2D:
    """Centered ``d1 u2 - d2 u1``; the mask shrinks to fully resolved stencils."""
    g = u.grid
    vals = (_axis_derivative(u.u2, g.hx, 0, g.periodic_x1)
            - _axis_derivative(u.u1, g.hy, 1, g.periodic_x2))
    return ScalarField2D(g, vals, _diagnostic_mask(u))


def gradient_scalar(f: np.ndarray, grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Centered gradient of a nodal scalar array (same stencils as divergence)."""
    return (_axis_derivative(f, grid.hx, 0, grid.periodic_x1),
            _axis_derivative(f, grid.hy, 1, grid.periodic_x2))


# ---------------------------------------------------------------------------
# forward-difference cell scheme (energy quadrature)

def _extend(f: np.ndarray, grid: Grid2D) -> np.ndarray:
    if grid.periodic_x1:
        f = np.concatenate([f, f[:1, :]], axis=0)
    if grid.periodic_x2:
        f = np.concatenate([f, f[:, :1]], axis=1)
    return f


def cell_diffs(f: np.ndarray, grid: Grid2D) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-cell forward differences and 4-corner mean of a nodal array.

    Returns ``(d1, d2, mean)`` with shape ``grid.cell_shape``; each is a
    second-order approximation at the cell center.
    """
    fe = _extend(f, grid)
    f00 = fe[:-1, :-1]
    f10 = fe[1:, :-1]
    f01 = fe[:-1, 1:]
    f11 = fe[1:, 1:]
    d1 = (f10 - f00 + f11 - f01) / (2.0 * grid.hx)
    d2 = (f01 - f00 + f11 - f10) / (2.0 * grid.hy)
    mean = (f00 + f10 + f01 + f11) / 4.0
    return d1, d2, mean


def cell_mask(mask: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Cells whose four corner nodes are all valid."""
    me = _extend(mask, grid)
    return me[:-1, :-1] & me[1:, :-1] & me[:-1, 1:] & me[1:, 1:]


def scatter_to_nodes(grid: Grid2D,
                     d1_w: np.ndarray | None = None,
                     d2_w: np.ndarray | None = None,
                     mean_w: np.ndarray | None = None) -> np.ndarray:
    """Exact adjoint of :func:`cell_diffs`.

    Given per-cell weights on the ``d1``, ``d2``, and ``mean`` outputs,
    accumulates the corresponding nodal sensitivities (periodic seams
    fold back onto the first node line).
    """
    ncx, ncy = grid.cell_shape
    buf = np.zeros((ncx + 1, ncy + 1))
    if d1_w is not None:
        c = d1_w / (2.0 * grid.hx)
        buf[1:, :-1] += c
        buf[:-1, :-1] -= c
        buf[1:, 1:] += c
        buf[:-1, 1:] -= c
    if d2_w is not None:
        c = d2_w / (2.0 * grid.hy)
        buf[:-1, 1:] += c
        buf[:-1, :-1] -= c
        buf[1:, 1:] += c
        buf[1:, :-1] -= c
    if mean_w is not None:
        c = mean_w / 4.0
        buf[:-1, :-1] += c
        buf[1:, :-1] += c
        buf[:-1, 1:] += c
        buf[1:, 1:] += c
    if grid.periodic_x1:
        buf[0, :] += buf[-1, :]
        buf = buf[:-1, :]
    if grid.periodic_x2:
        buf[:, 0] += buf[:, -1]
        buf = buf[:, :-1]
    return buf


# ---------------------------------------------------------------------------
# finite differences of fields

def shift_with_mask(a: np.ndarray, k: tuple[int, int], grid: Grid2D,
                    mask: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``a`` evaluated at ``x + k*h`` with a validity mask.

    Periodic axes wrap; on non-periodic axes nodes whose translate falls
    outside the grid are marked invalid (and filled with 0).
    """
    out = np.asarray(a)
    valid = np.ones(a.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    for axis, (kk, periodic, n) in enumerate(
            [(k[0], grid.periodic_x1, grid.nx), (k[1], grid.periodic_x2, grid.ny)]):
        if kk == 0:
            continue
        if periodic:
            out = np.roll(out, -kk, axis=axis)
            valid = np.roll(valid, -kk, axis=axis)
        else:
            if abs(kk) >= n:
                raise ValueError("offset exceeds the domain extent")
            shifted = np.zeros_like(out)
            ok = np.zeros(a.shape, dtype=bool)
            sm = np.moveaxis(shifted, axis, 0)
            om = np.moveaxis(ok, axis, 0)
            src = np.moveaxis(out, axis, 0)
            vm = np.moveaxis(valid, axis, 0)
            if kk > 0:
                sm[:-kk] = src[kk:]
                om[:-kk] = vm[kk:]
            else:
                sm[-kk:] = src[:kk]
                om[-kk:] = vm[:kk]
            out = shifted
            valid = ok
    return out, valid


def finite_difference(u: VectorField2D, k: tuple[int, int]) -> VectorField2D:
    """``D^h u(x) = u(x + h) - u(x)`` for ``h = (k1*hx, k2*hy)``.

    Defined on the intersection mask of the domain and its translate;
    the zero offset gives the zero field on the full mask.
    """
    g = u.grid
    if k == (0, 0):
        z = np.zeros(g.shape)
        return VectorField2D(g, z, z.copy(), mask=u.mask.copy())
    s1, m1 = shift_with_mask(u.u1, k, g, u.mask)
    s2, _ = shift_with_mask(u.u2, k, g, u.mask)
    both = m1 & u.mask
    d1 = np.where(both, s1 - u.u1, 0.0)
    d2 = np.where(both, s2 - u.u2, 0.0)
    return VectorField2D(g, d1, d2, mask=both)


# ---------------------------------------------------------------------------
# boundary trace diagnostics

def _inset_loop(u: VectorField2D, mx: int, my: int) -> tuple[np.ndarray, np.ndarray]:
    """Samples of u along the rectangle inset by (mx, my) nodes, plus arclength."""
    g = u.grid
    i0, i1 = mx, g.nx - 1 - mx
    j0, j1 = my, g.ny - 1 - my
    if i1 - i0 < 1 or j1 - j0 < 1:
        raise ValueError("inset distance exceeds half the domain width")
    idx: list[tuple[int, int]] = []
    idx += [(i, j0) for i in range(i0, i1)]
    idx += [(i1, j) for j in range(j0, j1)]
    idx += [(i, j1) for i in range(i1, i0, -1)]
    idx += [(i0, j) for j in range(j1, j0, -1)]
    ii = np.array([p[0] for p in idx])
    jj = np.array([p[1] for p in idx])
    pts = np.stack([g.x[ii], g.y[jj]], axis=1)
    seg = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    arclen = np.concatenate([[0.0], np.cumsum(seg)])[:-1]
    samples = np.stack([u.u1[ii, jj], u.u2[ii, jj]], axis=1)
    return samples, arclen


def _resample_loop(samples: np.ndarray, arclen: np.ndarray, t: np.ndarray) -> np.ndarray:
    total = arclen[-1] + (arclen[-1] - arclen[-2] if len(arclen) > 1 else 1.0)
    s = arclen / total
    out = np.empty((len(t), 2))
    for c in range(2):
        out[:, c] = np.interp(t, np.concatenate([s, [1.0]]),
                              np.concatenate([samples[:, c], samples[:1, c]]))
    return out


def trace_profile(u: VectorField2D, deltas: list[float]) -> dict:
    """Boundary-trace diagnostic: inset-loop samples and successive L1 gaps.

    For each inset distance delta (snapped to node multiples per axis)
    the field is sampled along the rectangle at that distance from the
    boundary; consecutive profiles are compared in L1 of the common loop
    parameter scaled by the boundary perimeter.
    """
    g = u.grid
    if g.periodic_x1 or g.periodic_x2:
        raise ValueError("trace profiles need a non-periodic rectangle")
    profiles = []
    n_t = 4 * max(g.nx, g.ny)
    t = (np.arange(n_t) + 0.5) / n_t
    perimeter = 4.0 * (g.lx + g.ly)
    for d in deltas:
        mx, my = max(round(d / g.hx), 0), max(round(d / g.hy), 0)
        samples, arclen = _inset_loop(u, mx, my)
        profiles.append({"delta": d, "samples": samples, "arclength": arclen,
                         "resampled": _resample_loop(samples, arclen, t)})
    distances = []
    for a, b in zip(profiles[:-1], profiles[1:]):
        gap = np.linalg.norm(a["resampled"] - b["resampled"], axis=1)
        distances.append(float(np.mean(gap) * perimeter))
    return {"profiles": profiles, "l1_distances": distances}
