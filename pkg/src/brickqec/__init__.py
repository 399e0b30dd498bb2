"""Random brickwork Clifford circuits as approximate and exact error-correcting codes."""
from brickqec._core import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
