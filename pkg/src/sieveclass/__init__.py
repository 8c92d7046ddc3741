"""Structural classification of locally stationary time series."""

__version__ = "0.1.0"
