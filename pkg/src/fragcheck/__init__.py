"""Definability of regular languages in first-order fragments with and
without modular position predicates, decided on the syntactic monoid and
cross-validated against semantic constructions."""

__version__ = "0.1.0"
