"""Exact max-flow/min-cut machinery for finite and lazily generated countable networks."""

__version__ = "0.1.0"
