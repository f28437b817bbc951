"""Exact lattice algebra for finite-order mapping classes of CP^2 # n(-CP^2)."""

__version__ = "0.1.0"
