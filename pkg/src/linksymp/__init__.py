"""Exact computations for linked Grassmannians and rank-2 limit linear series on chains."""

__version__ = "0.1.0"
