"""Exact-arithmetic toolkit for pointed toric monoids, extended cones,
cone complexes, and the tropical moduli atlas of stable weighted graphs."""

__version__ = "0.1.0"
