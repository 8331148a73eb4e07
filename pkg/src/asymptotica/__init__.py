"""Numerical laboratory for asymptotics of power-bounded Hilbert-space operators."""

__version__ = "0.1.0"
