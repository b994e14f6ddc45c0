"""Numerical toolkit for the delta-method analysis of Rankin-Selberg
L-functions at special points."""

__version__ = "0.1.0"
