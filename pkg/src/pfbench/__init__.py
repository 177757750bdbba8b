"""Operator-class certification and Putnam-Fuglede intertwining checks."""

__version__ = "0.1.0"
