"""Optimal adaptive feedback communication: closed-form limits and Monte Carlo checks."""

__version__ = "0.1.0"
