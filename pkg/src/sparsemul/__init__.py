"""Sparse binary multiples of primes and sumsets of multiplicative subgroups."""

__version__ = "0.1.0"
