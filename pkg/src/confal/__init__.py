"""Constrained falsification of black-box hybrid system models.

Searches for piecewise-constant input signals that satisfy an STL input
constraint while driving a model's output to violate an STL specification.
"""
from ._kernels import BACKEND
from .signal import Signal

__version__ = "0.1.0"
__all__ = ["BACKEND", "Signal", "__version__"]
