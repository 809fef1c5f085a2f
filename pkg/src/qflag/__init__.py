"""Quaternionic matrix decompositions and 4-vector-field machinery on flags."""

__version__ = "0.1.0"
