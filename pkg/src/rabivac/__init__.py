"""Vacuum Rabi dynamics of a two-level atom beyond the rotating-wave approximation."""
from ._kernels import BACKEND
from .model import AtomState, CoefficientSet, ModelParams, evaluate_coefficients, make_atom_state
from .propagator import (
    RiccatiDivergence,
    Trajectory,
    excited_population,
    integrate_riccati,
    propagate_direct,
    propagate_factored,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AtomState", "CoefficientSet", "ModelParams", "RiccatiDivergence", "Trajectory",
    "evaluate_coefficients", "excited_population", "integrate_riccati", "make_atom_state",
    "propagate_direct", "propagate_factored",
]
