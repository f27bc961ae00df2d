"""Frustrated Kagome Josephson junction arrays as a long-range Ising model."""

__version__ = "0.1.0"

from .core import ModelParams, TrianglePhysics, frustration_from_alpha, is_frustrated, triangle_physics, tunneling_amplitude
from .coupling import CouplingKernel, KernelSource, closed_form_kernel, finite_kernel, infinite_kernel_entry
from .errors import CapabilityError, NumericalError
from .lattice import Boundary, ConstraintMatrix, LatticeSpec, build_lattice, build_plaquettes, constraint_matrices, single_plaquette

__all__ = [
    "Boundary",
    "CapabilityError",
    "ConstraintMatrix",
    "CouplingKernel",
    "KernelSource",
    "LatticeSpec",
    "ModelParams",
    "NumericalError",
    "TrianglePhysics",
    "build_lattice",
    "build_plaquettes",
    "closed_form_kernel",
    "constraint_matrices",
    "finite_kernel",
    "frustration_from_alpha",
    "infinite_kernel_entry",
    "is_frustrated",
    "single_plaquette",
    "triangle_physics",
    "tunneling_amplitude",
]
