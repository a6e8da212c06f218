"""Exact computations for infinitesimal deformations of algebraic cycles."""

__version__ = "0.1.0"
