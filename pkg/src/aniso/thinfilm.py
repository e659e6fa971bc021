"""Thin-film energy on the unit square and the symmetry-defect bound.

The rescaled functional ``(1/2) int (d1 u1 + (1/delta) d2 u2)^2
+ eps (d1 u2 - (1/delta) d2 u1)^2`` under Dirichlet data in x1 and
periodicity in x2.  Its minimizers are one-dimensional; the defect bound
quantifies how far any admissible field sits above the 1D minimal
energy in terms of its x2 variation and its deviation from the exact
profile equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import EnergyBreakdown, energy
from .exact1d import F_eps, minimal_energy_1d, minimizer_profile_1d
from .grid import BCMode, BoundaryCondition, Grid2D, PhaseField2D
from .minimize import MinimizeReport, OptimizerConfig, minimize_energy
from .operators import cell_diffs


@dataclass(frozen=True)
class ThinFilmParams:
    eps: float
    aspect: float
    phi_minus: float = 0.0
    phi_plus: float = np.pi / 2

    def __post_init__(self) -> None:
        for name in ("eps", "aspect"):
            v = float(getattr(self, name))
            if not (v > 0 and np.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")

    def bc(self) -> BoundaryCondition:
        return BoundaryCondition(BCMode.DIRICHLET_X1_PERIODIC_X2,
                                 self.phi_minus, self.phi_plus)


def _check_admissible(phase: PhaseField2D, params: ThinFilmParams) -> None:
    bc = phase.bc
    if bc.mode is not BCMode.DIRICHLET_X1_PERIODIC_X2:
        raise ValueError("thin-film fields need Dirichlet x1 / periodic x2 data")
    if (abs(bc.phi_minus - params.phi_minus) > 1e-12
            or abs(bc.phi_plus - params.phi_plus) > 1e-12):
        raise ValueError("field boundary phases do not match the parameters")
    g = phase.grid
    if abs(g.lx - 1.0) > 1e-12 or abs(g.ly - 1.0) > 1e-12:
        raise ValueError("thin-film domain is the square (-1,1)^2")


def thinfilm_energy(phase: PhaseField2D, params: ThinFilmParams) -> EnergyBreakdown:
    """Quadrature identical to the minimization scheme (1/2 prefactor,
    1/aspect on the x2 derivatives)."""
    _check_admissible(phase, params)
    return energy(phase, params.eps, aspect=params.aspect, prefactor=0.5)


def x2_variation(phase: PhaseField2D) -> float:
    """Cell quadrature of ``(d2 phi)^2`` (unscaled symmetry diagnostic)."""
    g = phase.grid
    _, d2, _ = cell_diffs(phase.phi, g)
    return float(g.hx * g.hy * np.sum(d2 ** 2))


def thinfilm_grid(n: int) -> Grid2D:
    """Square grid admissible for Dirichlet-x1 (nodes on x1 = +-1),
    periodic in x2."""
    return Grid2D(n, n, periodic_x1=False, periodic_x2=True,
                  stagger_x1=0.0, stagger_x2=0.5 if n % 2 == 0 else 0.0)


def seeded_start(grid: Grid2D, params: ThinFilmParams, seed: int,
                 amplitude: float = 0.5, modes: int = 2) -> PhaseField2D:
    """Linear ramp between the Dirichlet phases plus a seeded smooth
    perturbation vanishing at x1 = +-1 and periodic in x2."""
    rng = np.random.default_rng(seed)
    xx, yy = grid.meshgrid()
    ramp = params.phi_minus + (params.phi_plus - params.phi_minus) * (xx + 1.0) / 2.0
    pert = np.zeros(grid.shape)
    for j in range(1, modes + 1):
        for k in range(0, modes + 1):
            c = rng.uniform(-1.0, 1.0) * amplitude / (j + k)
            ph = rng.uniform(0.0, 2.0 * np.pi)
            pert += c * np.sin(j * np.pi * (xx + 1.0) / 2.0) * np.cos(k * np.pi * yy + ph)
    phi = ramp + pert
    phi[0, :] = params.phi_minus
    phi[-1, :] = params.phi_plus
    return PhaseField2D(grid, phi, params.bc())


@dataclass
class ThinFilmResult:
    field: PhaseField2D
    report: MinimizeReport
    e_min: float
    rel_err: float
    x2_var: float


def minimize_thinfilm(params: ThinFilmParams, grid: Grid2D,
                      cfg: OptimizerConfig | None = None,
                      start: PhaseField2D | None = None,
                      seed: int = 0) -> ThinFilmResult:
    """Descend from a seeded start; report the gap to the 1D minimal
    energy and the x2-variation symmetry diagnostic."""
    if start is None:
        start = seeded_start(grid, params, seed)
    _check_admissible(start, params)
    field, report = minimize_energy(start, params.eps, cfg,
                                    aspect=params.aspect, prefactor=0.5)
    prof = minimal_energy_1d(params.eps, params.phi_minus, params.phi_plus)
    rel = abs(report.breakdown.total - prof.e_min) / prof.e_min
    return ThinFilmResult(field, report, prof.e_min, rel, x2_variation(field))


def profile_start(grid: Grid2D, params: ThinFilmParams) -> PhaseField2D:
    """The exact 1D minimizer embedded as an x2-independent field."""
    prof = minimal_energy_1d(params.eps, params.phi_minus, params.phi_plus)
    column = minimizer_profile_1d(prof, grid.x)
    return PhaseField2D(grid, np.repeat(column[:, None], grid.ny, axis=1),
                        params.bc())


# ---------------------------------------------------------------------------
# symmetry-defect bound

def defect_form(eps: float, angles: np.ndarray) -> np.ndarray:
    """The 2x2 quadratic form certifying the defect bound at each angle;
    det = 4 eps and trace = 2 (1 + eps) identically."""
    s = np.sin(angles)
    c = np.cos(angles)
    q = np.empty(np.shape(angles) + (2, 2))
    q[..., 0, 0] = 2.0 * (s * s + eps * c * c)
    q[..., 1, 1] = 2.0 * (c * c + eps * s * s)
    q[..., 0, 1] = q[..., 1, 0] = -2.0 * (1.0 - eps) * s * c
    return q


@dataclass(frozen=True)
class DefectBound:
    lhs: float
    rhs: float
    margin: float


def symmetry_defect_bound(phase: PhaseField2D, params: ThinFilmParams) -> DefectBound:
    """lhs = thin-film energy minus the 1D minimum; rhs = the lower bound

        (min(1, eps)/2) int (d1 phi - a / F'(phi))^2 + ((1/delta) d2 phi)^2

    with ``a = (F(phi+) - F(phi-))/2``.  In the continuum lhs >= rhs; on
    the grid the margin can dip below zero only by discretization error.
    """
    _check_admissible(phase, params)
    eps = params.eps
    bd = thinfilm_energy(phase, params)
    prof = minimal_energy_1d(eps, params.phi_minus, params.phi_plus)
    lhs = bd.total - prof.e_min
    a = (F_eps(params.phi_plus, eps) - F_eps(params.phi_minus, eps)) / 2.0
    g = phase.grid
    d1, d2, mean4 = cell_diffs(phase.phi, g)
    speed = np.sqrt(np.sin(mean4) ** 2 + eps * np.cos(mean4) ** 2)
    x_c = d1 - a / speed
    y_c = d2 / params.aspect
    rhs = 0.5 * min(1.0, eps) * g.hx * g.hy * float(np.sum(x_c ** 2 + y_c ** 2))
    return DefectBound(float(lhs), rhs, float(lhs) - rhs)
