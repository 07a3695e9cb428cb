"""Exact computations with coalgebras, algebras and bialgebras over operads."""

__version__ = "0.1.0"
