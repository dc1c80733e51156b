"""
Cremona maps of the plane: construction, verification, images of curves and
of line arrangements, and sequences of maps.
"""

__version__ = "1.0.0"
