"""Exact computation with special inverse monoid presentations."""

__version__ = "0.1.0"
