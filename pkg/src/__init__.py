"""Seed-driven weakly-supervised text classifier."""

__version__ = "0.1.0"
