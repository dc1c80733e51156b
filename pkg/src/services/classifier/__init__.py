"""
Classification of unions of lines: contraction certificates, witnesses of
non-contractibility, the bounded contraction search and the numerical
predicates on types.
"""

__version__ = "1.0.0"
