"""Static figure rendering for tracking run CSV logs."""

from .errors import PlotsError, SchemaMismatch
from .figures import FIGURE_IDS, build
from .io import RunData, load_run_dir

__all__ = [
    "FIGURE_IDS",
    "PlotsError",
    "RunData",
    "SchemaMismatch",
    "build",
    "load_run_dir",
]
