"""Dependently typed kernel whose judgements are indexed by a lattice of theories."""

__version__ = "0.1.0"
