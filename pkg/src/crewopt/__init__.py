"""Crew-pairing optimization: column-generation heuristic solver."""

__version__ = "0.1.0"
