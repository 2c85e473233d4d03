"""Rigorous tools for the Brjuno-type function phi and quadratic Julia sets."""

__version__ = "0.1.0"
