"""Flexible pentagonal bipyramids and an embedded 8-vertex flexible polyhedron."""

__version__ = "0.1.0"
