"""Quartic-extension density constants over quadratic number fields."""

__version__ = "0.1.0"
