"""Deterministic figure rendering for sparse-recovery experiment CSVs."""

from .spec import FigureSpec, SchemaError, load_spec
from .render import render

__all__ = ["FigureSpec", "SchemaError", "load_spec", "render"]
