"""Regenerates the benchmark figures from hitting-time sweep CSV output.

This package talks to the simulation harness only through its file formats
(`summary.csv` and the optional `fit.json` next to it); it never imports the
harness.
"""

from .figures import FigureKind, FigureSpec, SchemaError, render

__all__ = ["FigureKind", "FigureSpec", "SchemaError", "render"]

__version__ = "0.1.0"
