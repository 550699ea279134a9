"""Mahler measures of cyclotomic-lattice walks, Gaussian periods, and a pruned search for small cyclic measures."""

from .scan import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
