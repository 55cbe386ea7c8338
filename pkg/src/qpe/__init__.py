"""Quantum-inspired positional encodings for graphs and exact oracles for them."""

__version__ = "0.1.0"
