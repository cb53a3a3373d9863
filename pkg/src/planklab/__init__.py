"""Numerical laboratory for plank coverings, overlap counting, and L4 square functions."""

__version__ = "0.1.0"
