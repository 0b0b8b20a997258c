"""Lexicographic shellability machinery for quotient complexes of order complexes."""

__version__ = "0.1.0"
