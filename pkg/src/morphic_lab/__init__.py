"""Morphic and ea-morphic finite p-groups: predicates, catalog scans and triples."""

__version__ = "0.1.0"
