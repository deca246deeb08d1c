"""ceilfig: figure rendering for ceilsim aggregate outputs."""

from __future__ import annotations

__version__ = "0.1.0"

from .figures import FIGURE_IDS, FigureSpec, render
from .loader import Condition, SchemaError, discover, read_rows

__all__ = [
    "__version__",
    "FIGURE_IDS",
    "FigureSpec",
    "Condition",
    "SchemaError",
    "discover",
    "read_rows",
    "render",
]
