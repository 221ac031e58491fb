"""Numerical diagnostics for lower bounds of weighted composition operators."""

__version__ = "0.1.0"
