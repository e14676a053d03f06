"""Exact lambda-ring probability: Witt vectors, symmetric series, motivic Euler products
and finite-field enumeration for zeta and L-function statistics."""

__version__ = "0.1.0"
