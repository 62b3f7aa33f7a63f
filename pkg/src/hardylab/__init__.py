"""Numerical laboratory for composition operators on weighted Hardy spaces."""

__version__ = "0.1.0"
