"""
Controllers package for cremona-lines.

This package contains the controller that turns one CLI invocation into
calls to the geometry, linear-system, Cremona and classifier services.
"""

__version__ = "1.0.0"
