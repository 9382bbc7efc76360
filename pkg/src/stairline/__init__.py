"""Stair-convexity tools for bounding how many simplices a line can stab."""

__version__ = "0.1.0"
