"""Aggregated ±1 random fields with random persistence and their Gaussian limits."""

__version__ = "0.1.0"
