"""Finite element spaces on active meshes."""

from .basis import ElementBasis, eval_lagrange_1d
from .fespace import CellMap, FESpace, SpaceMode, build_space, evaluate, interpolate_nodal

__all__ = [
    "CellMap",
    "ElementBasis",
    "FESpace",
    "SpaceMode",
    "build_space",
    "eval_lagrange_1d",
    "evaluate",
    "interpolate_nodal",
]
