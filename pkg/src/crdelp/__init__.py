"""Defeasible logic programs under conflict-resolution semantics."""

__version__ = "0.1.0"
