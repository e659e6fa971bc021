"""Numerical laboratory for the anisotropic energy of unit vector fields.

The package implements, minimizes, and diagnoses the energy

    E_eps(u) = integral of (div u)^2 + eps * (curl u)^2

over S^1-valued fields u on rectangular grids, together with its exact
one-dimensional theory, thin-film rescaling, fractional-regularity
instrumentation, kinetic/entropy diagnostics, singular test fields, and
the mollify-then-project recovery construction.
"""

from .grid import (
    BCMode,
    BoundaryCondition,
    Grid2D,
    PhaseField2D,
    ScalarField2D,
    VectorField2D,
    phase_to_vector,
    stagger_avoiding_origin,
)
from .energy import EnergyBreakdown, energy, energy_gradient
from .operators import curl, divergence, finite_difference, trace_profile
from .exact1d import (
    F_eps,
    F_eps_inverse,
    energy_1d,
    interval_decomposition,
    minimal_energy_1d,
    minimizer_profile_1d,
    recovery_1d,
)
from .minimize import OptimizerConfig, gradient_check, minimize_energy
from .besov import (
    besov_seminorm,
    gagliardo_seminorm,
    lp_difference_norm,
    regularity_ratio,
    scaling_exponent,
)
from .kinetic import (
    PHI0,
    SIN2,
    AngularGrid,
    coercivity_scan,
    compensation_residual,
    delta_quantity,
    entropy_phi_g,
    entropy_production_residual,
)
from .singular import (
    circle_loop,
    jacobian_total,
    make_jump,
    make_vortex,
    rectangle_loop,
    winding_number,
)
from .recovery import (
    commutator_check,
    mollify,
    project,
    recovery_energy_curve,
    vmo_modulus,
)
from .thinfilm import (
    ThinFilmParams,
    minimize_thinfilm,
    symmetry_defect_bound,
    thinfilm_energy,
)

__version__ = "0.1.0"

__all__ = [
    "AngularGrid",
    "BCMode",
    "BoundaryCondition",
    "EnergyBreakdown",
    "F_eps",
    "F_eps_inverse",
    "Grid2D",
    "OptimizerConfig",
    "PHI0",
    "PhaseField2D",
    "SIN2",
    "ScalarField2D",
    "ThinFilmParams",
    "VectorField2D",
    "besov_seminorm",
    "circle_loop",
    "coercivity_scan",
    "commutator_check",
    "compensation_residual",
    "curl",
    "delta_quantity",
    "divergence",
    "energy",
    "energy_1d",
    "energy_gradient",
    "entropy_phi_g",
    "entropy_production_residual",
    "finite_difference",
    "gagliardo_seminorm",
    "gradient_check",
    "interval_decomposition",
    "jacobian_total",
    "lp_difference_norm",
    "make_jump",
    "make_vortex",
    "minimal_energy_1d",
    "minimize_energy",
    "minimize_thinfilm",
    "minimizer_profile_1d",
    "mollify",
    "phase_to_vector",
    "project",
    "recovery_1d",
    "recovery_energy_curve",
    "rectangle_loop",
    "regularity_ratio",
    "scaling_exponent",
    "stagger_avoiding_origin",
    "symmetry_defect_bound",
    "thinfilm_energy",
    "trace_profile",
    "vmo_modulus",
    "winding_number",
]
