"""Exact exponential-time graph algorithms via multilinear monomial detection."""

__version__ = "0.1.0"
