"""Crystalline obstructions and upper bounds for geometric Picard numbers."""

__version__ = "0.1.0"
