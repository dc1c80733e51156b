"""
Linear systems of plane curves with assigned base points: exact dimensions,
adjoint systems, adjoint sequences and log plurigenera.
"""

__version__ = "1.0.0"
