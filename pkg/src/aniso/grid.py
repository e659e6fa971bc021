"""Rectangular grids, phase fields, and unit vector fields.

Arrays are indexed ``[i, j]`` with ``i`` along x1 and ``j`` along x2.  A
grid covers the rectangle ``[-lx, lx] x [-ly, ly]``; node coordinates
along a non-periodic axis with stagger 0 run exactly from ``-l`` to
``l``, while a periodic axis identifies ``l`` with ``-l`` and drops the
duplicate seam node.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

UNIT_TOL = 1e-12


def stagger_avoiding_origin(n: int, periodic: bool) -> float:
    """Stagger (0 or 1/2) that keeps coordinate 0 strictly between nodes.

    On a non-periodic axis the node at coordinate 0 exists for odd ``n``
    when the stagger is 0 and for even ``n`` when it is 1/2; a periodic
    axis behaves the other way around.
    """
    if periodic:
        return 0.5 if n % 2 == 0 else 0.0
    return 0.0 if n % 2 == 0 else 0.5


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular node grid on ``[-lx, lx] x [-ly, ly]``.

    ``stagger_x1``/``stagger_x2`` shift all nodes along that axis by the
    given fraction of a spacing; half-spacing staggers are used to keep
    point singularities (vortex core, jump interface) off nodes and node
    columns.
    """

    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0
    periodic_x1: bool = False
    periodic_x2: bool = False
    stagger_x1: float = 0.0
    stagger_x2: float = 0.0

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError("node counts must be >= 2")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("half-widths must be positive")

    @classmethod
    def off_origin(cls, nx: int, ny: int, lx: float = 1.0, ly: float = 1.0,
                   periodic_x1: bool = False, periodic_x2: bool = False) -> "Grid2D":
        """Grid whose staggers are chosen so no node lies on either axis."""
        return cls(nx, ny, lx, ly, periodic_x1, periodic_x2,
                   stagger_avoiding_origin(nx, periodic_x1),
                   stagger_avoiding_origin(ny, periodic_x2))

    @property
    def hx(self) -> float:
        return 2.0 * self.lx / (self.nx if self.periodic_x1 else self.nx - 1)

    @property
    def hy(self) -> float:
        return 2.0 * self.ly / (self.ny if self.periodic_x2 else self.ny - 1)

    @property
    def x(self) -> np.ndarray:
        return -self.lx + (np.arange(self.nx) + self.stagger_x1) * self.hx

    @property
    def y(self) -> np.ndarray:
        return -self.ly + (np.arange(self.ny) + self.stagger_x2) * self.hy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_shape(self) -> tuple[int, int]:
        """Number of quadrature cells along each axis (periodic axes wrap)."""
        ncx = self.nx if self.periodic_x1 else self.nx - 1
        ncy = self.ny if self.periodic_x2 else self.ny - 1
        return (ncx, ncy)

    @property
    def cell_count(self) -> int:
        ncx, ncy = self.cell_shape
        return ncx * ncy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def snap_offset(self, h: tuple[float, float]) -> tuple[int, int]:
        """Round a physical offset to the nearest whole-node offset."""
        return (round(h[0] / self.hx), round(h[1] / self.hy))

    def offset_length(self, k: tuple[int, int]) -> float:
        return float(np.hypot(k[0] * self.hx, k[1] * self.hy))


class BCMode(str, Enum):
    FREE = "free"
    DIRICHLET_X1_PERIODIC_X2 = "dirichlet_x1_periodic_x2"
    FULLY_PERIODIC = "fully_periodic"


@dataclass(frozen=True)
class BoundaryCondition:
    mode: BCMode = BCMode.FREE
    phi_minus: float = 0.0
    phi_plus: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", BCMode(self.mode))
        if not (np.isfinite(self.phi_minus) and np.isfinite(self.phi_plus)):
            raise ValueError("boundary phases must be finite")

    def check_grid(self, grid: Grid2D) -> None:
        m = self.mode
        if m is BCMode.FREE:
            if grid.periodic_x1 or grid.periodic_x2:
                raise ValueError("free bc requires a non-periodic grid")
        elif m is BCMode.DIRICHLET_X1_PERIODIC_X2:
            if grid.periodic_x1 or not grid.periodic_x2:
                raise ValueError(
                    "dirichlet_x1_periodic_x2 requires non-periodic x1 and periodic x2")
            if grid.stagger_x1 != 0.0:
                raise ValueError(
                    "dirichlet bc needs nodes exactly at x1 = +/-lx (stagger_x1 = 0)")
        elif m is BCMode.FULLY_PERIODIC:
            if not (grid.periodic_x1 and grid.periodic_x2):
                raise ValueError("fully_periodic bc requires a doubly periodic grid")


FREE = BoundaryCondition(BCMode.FREE)


@dataclass
class PhaseField2D:
    """Scalar phase ``phi`` per node; represents the unit field ``e^{i phi}``."""

    grid: Grid2D
    phi: np.ndarray
    bc: BoundaryCondition = FREE

    def __post_init__(self) -> None:
        self.phi = np.asarray(self.phi, dtype=float)
        if self.phi.shape != self.grid.shape:
            raise ValueError(f"phi shape {self.phi.shape} != grid shape {self.grid.shape}")
        self.bc.check_grid(self.grid)
        if self.bc.mode is BCMode.DIRICHLET_X1_PERIODIC_X2:
            if not (np.all(self.phi[0, :] == self.bc.phi_minus)
                    and np.all(self.phi[-1, :] == self.bc.phi_plus)):
                raise ValueError("dirichlet bc must hold exactly on the x1 = +/-lx columns")

    def free_node_mask(self) -> np.ndarray:
        """True where the optimizer may update phi."""
        free = np.ones(self.grid.shape, dtype=bool)
        if self.bc.mode is BCMode.DIRICHLET_X1_PERIODIC_X2:
            free[0, :] = False
            free[-1, :] = False
        return free

    def with_phi(self, phi: np.ndarray) -> "PhaseField2D":
        return PhaseField2D(self.grid, phi, self.bc)

    def copy(self) -> "PhaseField2D":
        return PhaseField2D(self.grid, self.phi.copy(), self.bc)


@dataclass
class VectorField2D:
    grid: Grid2D
    u1: np.ndarray
    u2: np.ndarray
    unit_flag: bool = False
    mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.u1 = np.asarray(self.u1, dtype=float)
        self.u2 = np.asarray(self.u2, dtype=float)
        if self.u1.shape != self.grid.shape or self.u2.shape != self.grid.shape:
            raise ValueError("component shapes must match the grid")
        if self.mask is None:
            self.mask = np.ones(self.grid.shape, dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.grid.shape:
                raise ValueError("mask shape must match the grid")
        if self.unit_flag:
            sq = self.u1[self.mask] ** 2 + self.u2[self.mask] ** 2
            worst = float(np.max(np.abs(sq - 1.0))) if sq.size else 0.0
            if worst > UNIT_TOL:
                raise ValueError(f"|u|^2 deviates from 1 by {worst:.3e} on the mask")

    def components(self) -> np.ndarray:
        return np.stack([self.u1, self.u2])

    def copy(self) -> "VectorField2D":
        return VectorField2D(self.grid, self.u1.copy(), self.u2.copy(),
                             self.unit_flag, self.mask.copy())


@dataclass
class ScalarField2D:
    grid: Grid2D
    values: np.ndarray
    mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.mask is None:
            self.mask = np.ones(self.values.shape, dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.values.shape:
                raise ValueError("mask shape must match values")


def phase_to_vector(phase: PhaseField2D) -> VectorField2D:
    """Realize ``u = (cos phi, sin phi)``; the result carries ``unit_flag``."""
    return VectorField2D(phase.grid, np.cos(phase.phi), np.sin(phase.phi), unit_flag=True)
