"""Exact construction of {0,1} Toeplitz sequences from prescribed letter frequencies
via refining Kakutani-Rokhlin partitions (left-ordered Bratteli diagrams)."""

from .builder import BuildParams, TargetSpec, apportion, build, plan_level
from .diagram import CellRef, CellSet, Column, Diagram, Level, append_level, new_root

__all__ = [
    "BuildParams", "TargetSpec", "apportion", "build", "plan_level",
    "CellRef", "CellSet", "Column", "Diagram", "Level", "append_level", "new_root",
]
__version__ = "0.1.0"
