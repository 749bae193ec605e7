"""Adapt light-mode chart bitmaps to dark mode by palette optimization."""

__version__ = "0.1.0"
