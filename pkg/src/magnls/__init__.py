"""magnls: spectral laboratory for the strong-field magnetic NLS models."""

__version__ = "0.1.0"

from .axial import AxialGrid, PotentialSpec, build_axial_grid, propagate_axial
from .averaging import eval_F, eval_Fav, eval_Fav_resonant
from .evolve import BlowupError, SimConfig, evolve, filtered_gap, step_eps, step_limit
from .field import SpectralField, analyze, field_from_modes, field_from_values, nonlinear_phase, norm, synthesize
from .functionals import (
    ObservableSeries,
    a_functional,
    angular_momentum,
    e0_eps,
    energy_eps,
    energy_limit,
    mass,
    scale_field,
)
from .hermite import (
    HermiteBasis,
    JointEigenStructure,
    apply_oscillator_propagator,
    build_hermite_basis,
    build_joint_eigenstructure,
    project_eigenlevel,
)

__all__ = [
    "AxialGrid",
    "BlowupError",
    "HermiteBasis",
    "JointEigenStructure",
    "ObservableSeries",
    "PotentialSpec",
    "SimConfig",
    "SpectralField",
    "a_functional",
    "analyze",
    "angular_momentum",
    "apply_oscillator_propagator",
    "build_axial_grid",
    "build_hermite_basis",
    "build_joint_eigenstructure",
    "e0_eps",
    "energy_eps",
    "energy_limit",
    "eval_F",
    "eval_Fav",
    "eval_Fav_resonant",
    "evolve",
    "field_from_modes",
    "field_from_values",
    "filtered_gap",
    "mass",
    "nonlinear_phase",
    "norm",
    "project_eigenlevel",
    "propagate_axial",
    "scale_field",
    "step_eps",
    "step_limit",
    "synthesize",
]
