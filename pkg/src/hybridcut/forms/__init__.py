"""Bilinear forms: assembly of the hybridized system and norm evaluation."""

from .assembly import (
    BlockSystem,
    Triplets,
    assemble,
    assemble_bulk_stiffness,
    assemble_ghost_penalty_bulk,
    assemble_load,
    assemble_nitsche,
    assemble_skeleton_stabilization,
)
from .discretization import (
    GLOBAL_GRID,
    SINGLE_ELEMENT,
    BoundarySegment,
    Discretization,
    SkeletonSegment,
    discretize,
)
from .norms import ExactSolution, energy_error, energy_norm, galerkin_residual, l2_errors
from .params import MethodParams

__all__ = [
    "GLOBAL_GRID",
    "SINGLE_ELEMENT",
    "BlockSystem",
    "BoundarySegment",
    "Discretization",
    "ExactSolution",
    "MethodParams",
    "SkeletonSegment",
    "Triplets",
    "assemble",
    "assemble_bulk_stiffness",
    "assemble_ghost_penalty_bulk",
    "assemble_load",
    "assemble_nitsche",
    "assemble_skeleton_stabilization",
    "discretize",
    "energy_error",
    "energy_norm",
    "galerkin_residual",
    "l2_errors",
]
