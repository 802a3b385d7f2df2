"""Geodesic restrictions of Maass forms and toric periods over real quadratic fields."""
__version__ = "0.1.0"
