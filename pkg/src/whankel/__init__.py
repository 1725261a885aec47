"""Windowed Hankel transform and numerical checks of its uncertainty inequalities."""
__version__ = "0.1.0"
