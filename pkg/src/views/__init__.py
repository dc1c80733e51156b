"""
Views package for cremona-lines.

Renders command payloads as JSON documents or short text reports.
"""

__version__ = "1.0.0"
