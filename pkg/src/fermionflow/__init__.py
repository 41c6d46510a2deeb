"""Exact transport and counting statistics for correlated free-fermion quenches."""

__version__ = "0.1.0"
