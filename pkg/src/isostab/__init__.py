"""Quantitative stability tools for sets whose mean curvature is bounded by that of the unit sphere."""

__version__ = "0.1.0"
