"""Quasi-Monte Carlo cubature: point generators, measure transforms, integrands and stopping criteria."""

__version__ = "0.1.0"
