"""Hamilton trajectories, two-point interpolation and entropy convexity."""
from .convexity import (ConvexityReport, FormResult, ReversalCheck, convexity_report,
                        entropy_derivative_identity_residual, green_kernel, reversed_cost_rate,
                        reversed_cost_rate_direct, time_reversal_check)
from .eci import ECITerms, eci_estimate, eci_residual, eci_terms, reversible_eci_residual, single_terms
from .hamilton import PhaseTrajectory, hamilton_flow, integrate_batch, interpolation_cost, lagrangian_along
from .interior import InteriorReport, interior_assumption_check
from .shooting import shoot

__all__ = [
    "ConvexityReport", "ECITerms", "FormResult", "InteriorReport", "PhaseTrajectory", "ReversalCheck",
    "convexity_report", "eci_estimate", "eci_residual", "eci_terms", "entropy_derivative_identity_residual",
    "green_kernel", "hamilton_flow", "integrate_batch", "interior_assumption_check", "interpolation_cost",
    "lagrangian_along", "reversed_cost_rate", "reversed_cost_rate_direct", "reversible_eci_residual",
    "shoot", "single_terms", "time_reversal_check",
]
