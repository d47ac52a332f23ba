"""Exact correction of almost actions of graphs of finite groups on finite sets."""

from __future__ import annotations

from .cone import ConeProblem, ConeSolution, integer_kernel_point
from .correct import CorrectionReport, fix_vertex_action, realize_action, stabilize
from .gog import AlmostAction, GraphOfGroups, defect, presentation, validate_gog
from .groups import FiniteAction, FiniteGroup, cyclic_group, subgroup_classes, validate_group
from .lattice import dg_matrix, kernel_defect, sharp
from .schreier import AlmostAutomorphism, SchreierGraph, repair

__all__ = [
    "AlmostAction",
    "AlmostAutomorphism",
    "ConeProblem",
    "ConeSolution",
    "CorrectionReport",
    "FiniteAction",
    "FiniteGroup",
    "GraphOfGroups",
    "SchreierGraph",
    "cyclic_group",
    "defect",
    "dg_matrix",
    "fix_vertex_action",
    "integer_kernel_point",
    "kernel_defect",
    "presentation",
    "realize_action",
    "repair",
    "sharp",
    "stabilize",
    "subgroup_classes",
    "validate_gog",
    "validate_group",
]
