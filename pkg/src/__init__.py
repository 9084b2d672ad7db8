"""Leafbound - invariant curves of plane foliations and their degree bounds."""

__version__ = "0.1.0"
