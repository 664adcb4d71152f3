"""Sandpile relaxations on lattice polygons and their tropical scaling limits."""

__version__ = "0.1.0"
