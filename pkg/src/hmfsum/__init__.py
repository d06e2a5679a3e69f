"""Numerical L-series of harmonic Maass forms and verification of their
Bessel-kernel and Riesz-mean summation formulas."""

__version__ = "0.1.0"
