"""
Exact projective-plane primitives: rationals, points, lines, projectivities
and sparse homogeneous polynomials.
"""

__version__ = "1.0.0"
