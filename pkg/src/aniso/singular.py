"""Singular test fields and loop probes.

The two canonical obstructions: a divergence-free jump across the
vertical interface (normal component continuous, tangential component
flips sign) and the unit vortex.  Winding numbers and the Jacobian mass
are measured as phase circulations along resolved grid loops, avoiding
derivatives of the singular fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, VectorField2D


@dataclass(frozen=True)
class JumpSpec:
    """Common normal component n of ``u+- = (n, +-sqrt(1 - n^2))``."""

    n: float = 0.0

    def __post_init__(self) -> None:
        if not abs(self.n) < 1.0:
            raise ValueError("jump normal component must satisfy |n| < 1")


def make_jump(grid: Grid2D, spec: JumpSpec | float = 0.0) -> VectorField2D:
    """Piecewise-constant unit field jumping across the line x1 = 0.

    The first component is the constant n (so the normal trace is
    continuous and the field is divergence-free away from the
    interface); the second flips sign with x1.  Requires the interface
    to fall strictly between node columns.
    """
    if not isinstance(spec, JumpSpec):
        spec = JumpSpec(float(spec))
    x = grid.x
    if np.min(np.abs(x)) < 1e-9 * grid.hx:
        raise ValueError(
            "a node column sits on the interface x1 = 0; build the grid with "
            "Grid2D.off_origin or an explicit stagger")
    if not (x.min() < 0.0 < x.max()):
        raise ValueError("the interface x1 = 0 must lie inside the domain")
    t = math.sqrt(1.0 - spec.n ** 2)
    u1 = np.full(grid.shape, spec.n)
    u2 = np.where(x[:, None] > 0.0, t, -t) * np.ones((1, grid.ny))
    return VectorField2D(grid, u1, u2, unit_flag=True)


def make_vortex(grid: Grid2D, core_radius_spacings: float = 2.0) -> VectorField2D:
    """Unit vortex ``(-x2, x1)/|x|`` with the core masked out.

    Nodes within ``core_radius_spacings`` grid spacings of the origin
    are excluded from the mask (and zero-filled).
    """
    xx, yy = grid.meshgrid()
    r = np.hypot(xx, yy)
    h = max(grid.hx, grid.hy)
    if float(r.min()) <= 1e-12 * h:
        raise ValueError(
            "a node sits on the vortex core; build the grid with Grid2D.off_origin")
    mask = r >= core_radius_spacings * h
    rs = np.where(mask, r, 1.0)
    u1 = np.where(mask, -yy / rs, 0.0)
    u2 = np.where(mask, xx / rs, 0.0)
    return VectorField2D(grid, u1, u2, unit_flag=True, mask=mask)


@dataclass(frozen=True)
class LoopSpec:
    """Ordered closed node loop; closure from the last node back to the
    first is implicit."""

    nodes: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.nodes) < 3:
            raise ValueError("a loop needs at least 3 nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("loop nodes must be distinct (closure is implicit)")
        pts = list(self.nodes) + [self.nodes[0]]
        for (i0, j0), (i1, j1) in zip(pts[:-1], pts[1:]):
            if max(abs(i1 - i0), abs(j1 - j0)) > 2:
                raise ValueError("consecutive loop nodes must be within 2 spacings")

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ii = np.array([p[0] for p in self.nodes])
        jj = np.array([p[1] for p in self.nodes])
        return ii, jj


def rectangle_loop(grid: Grid2D, inset: int) -> LoopSpec:
    """Counterclockwise rectangle of nodes inset from the grid boundary."""
    i0, i1 = inset, grid.nx - 1 - inset
    j0, j1 = inset, grid.ny - 1 - inset
    if i1 - i0 < 2 or j1 - j0 < 2:
        raise ValueError("inset leaves no room for a loop")
    nodes: list[tuple[int, int]] = []
    nodes += [(i, j0) for i in range(i0, i1)]
    nodes += [(i1, j) for j in range(j0, j1)]
    nodes += [(i, j1) for i in range(i1, i0, -1)]
    nodes += [(i0, j) for j in range(j1, j0, -1)]
    return LoopSpec(tuple(nodes))


def circle_loop(grid: Grid2D, radius: float, n_nodes: int,
                center: tuple[float, float] = (0.0, 0.0)) -> LoopSpec:
    """Discretized circle snapped to grid nodes (consecutive duplicates dropped)."""
    ang = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    px = center[0] + radius * np.cos(ang)
    py = center[1] + radius * np.sin(ang)
    ii = np.clip(np.rint((px - grid.x[0]) / grid.hx).astype(int), 0, grid.nx - 1)
    jj = np.clip(np.rint((py - grid.y[0]) / grid.hy).astype(int), 0, grid.ny - 1)
    nodes: list[tuple[int, int]] = []
    for p in zip(ii.tolist(), jj.tolist()):
        if not nodes or p != nodes[-1]:
            nodes.append(p)
    if len(nodes) > 1 and nodes[0] == nodes[-1]:
        nodes.pop()
    return LoopSpec(tuple(nodes))


def _loop_angles(u: VectorField2D, loop: LoopSpec) -> np.ndarray:
    ii, jj = loop.index_arrays()
    if not np.all(u.mask[ii, jj]):
        raise ValueError("loop passes through masked-out nodes")
    a1 = u.u1[ii, jj]
    a2 = u.u2[ii, jj]
    sq = a1 ** 2 + a2 ** 2
    if np.max(np.abs(sq - 1.0)) > 1e-9:
        raise ValueError("winding probes need |u| = 1 along the loop")
    return np.arctan2(a2, a1)


def _wrapped_increments(theta: np.ndarray) -> np.ndarray:
    d = np.diff(np.concatenate([theta, theta[:1]]))
    d = np.mod(d + np.pi, 2.0 * np.pi) - np.pi
    if np.any(np.abs(d) >= np.pi - 1e-9):
        raise ValueError("loop under-resolved: a consecutive angle gap reaches pi")
    return d


def winding_number(u: VectorField2D, loop: LoopSpec) -> int:
    """Integer phase circulation ``(1/2 pi) * sum`` of wrapped increments."""
    d = _wrapped_increments(_loop_angles(u, loop))
    total = float(np.sum(d)) / (2.0 * np.pi)
    k = round(total)
    if abs(total - k) > 1e-6:
        raise ValueError(f"circulation {total} is not an integer multiple of 2*pi")
    return int(k)


def jacobian_total(u: VectorField2D, loop: LoopSpec) -> float:
    """Enclosed Jacobian mass ``(1/2) contour-integral u ^ du`` (trapezoid).

    For unit fields each segment contributes ``sin`` of the wrapped
    angle increment, so the value approaches ``pi * winding`` on
    resolved loops.
    """
    d = _wrapped_increments(_loop_angles(u, loop))
    return 0.5 * float(np.sum(np.sin(d)))
