"""
Combinatorial and geometric description of unions of lines: configurations,
types, numerical analysis and realization of the classified families.
"""

__version__ = "1.0.0"
