"""Hamiltonian-entropy systems, conjugation and pointwise diagnostics."""
from .derivatives import DerivativeReport, verify_derivatives
from .domain import (Axis, BoxDomain, Chart, Domain, GridSpec, ProductDomain, SimplexDomain,
                     default_chart, identity_chart, product_chart, simplex_chart)
from .legendre import lagrangian, legendre_solve
from .pointwise import (TiltedDecomposition, information, information_or_nan, psi, psi_star,
                        reversibility_defect, stationarity_residual, tilted_decomposition,
                        tilted_decomposition_residual)
from .system import HamiltonianEval, HamiltonianSystem, adjoint, symmetrize, tilted

__all__ = [
    "Axis", "BoxDomain", "Chart", "DerivativeReport", "Domain", "GridSpec", "HamiltonianEval",
    "HamiltonianSystem", "ProductDomain", "SimplexDomain", "TiltedDecomposition", "adjoint",
    "default_chart", "identity_chart", "information", "information_or_nan", "lagrangian",
    "legendre_solve", "product_chart", "psi", "psi_star", "reversibility_defect",
    "simplex_chart", "stationarity_residual", "symmetrize", "tilted", "tilted_decomposition",
    "tilted_decomposition_residual", "verify_derivatives",
]
