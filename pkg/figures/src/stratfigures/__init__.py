"""Batch figure renderer for stratmodes CSV/JSON outputs."""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaMismatch, read_table, render

__all__ = ["FigureSpec", "SchemaMismatch", "read_table", "render",
           "__version__"]
