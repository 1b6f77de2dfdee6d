"""Site-percolated planar triangulations and their encoding by lattice walks."""

from .combmap import BLUE, RED, DichromaticBoundaryMap, Triangulation
from .errors import TriPercError
from .walkcore import Walk

__all__ = ["BLUE", "RED", "DichromaticBoundaryMap", "Triangulation", "TriPercError", "Walk"]
__version__ = "0.1.0"
