"""Desk-scale laboratory for counting statistics and entanglement of
free-fermion ground states of discretized semiclassical Schrodinger
operators."""

__version__ = "0.1.0"
