"""Render publication-style figures from hierflow tidy report directories.

This package reads only the report CSV files; it never touches raw bundles
and never recomputes statistics. Gap markers become breaks in the plotted
lines, and identical inputs always produce identical image bytes.
"""

__version__ = "0.1.0"

from .render import FIGURE_IDS, SchemaError, build_figure, render  # noqa: F401
