"""Numerical checks for Hamiltonian-entropy systems from path-space large deviations."""
__version__ = "0.1.0"
