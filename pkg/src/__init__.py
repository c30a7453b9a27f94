"""Dual-engine simulator for broadband squeezed vacuum."""

__version__ = "0.3.0"
