"""Exact counting, compression and search for intersecting set families."""

__version__ = "0.1.0"
