"""Directed neighbour percolation on Z^d: models, dual exploration, constrained
and enhanced bond percolation, exact oracles and Monte Carlo estimators."""

from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
