"""Memoisation of linear-system dimensions."""

__version__ = "1.0.0"
