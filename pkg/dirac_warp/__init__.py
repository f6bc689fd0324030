"""Partial-wave reduction and numerical experiments for the Dirac equation on
spherically symmetric manifolds ``dr^2 + phi(r)^2 dw^2``."""

__version__ = "0.1.0"
