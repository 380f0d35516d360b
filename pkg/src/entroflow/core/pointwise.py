"""Pointwise quantities attached to a Hamiltonian-entropy pair."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._parallel import chunked_max
from .domain import GridSpec
from .legendre import legendre_solve
from .system import HamiltonianSystem, adjoint, tilted


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def information(system: HamiltonianSystem, x) -> np.ndarray:
    """Entropy dissipation rate ``-<DS(x), H_p(x, 0)>`` along the zero-cost flow."""
    x = system.require_interior(x)
    ds = system.entropy_gradient(x)
    return -_dot(ds, system.H_p(x, np.zeros_like(x)))


def information_or_nan(system: HamiltonianSystem, x) -> np.ndarray:
    """Like :func:`information` but NaN at non-interior states instead of raising."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape[:-1], np.nan)
    inside = system.domain.is_interior(x)
    if np.any(inside):
        out[inside] = information(system, x[inside])
    return out


def stationarity_residual(system: HamiltonianSystem, x) -> np.ndarray:
    """``|H(x, DS(x))|``; vanishes when ``S`` is a stationary solution."""
    x = system.require_interior(x)
    return np.abs(system.H(x, system.entropy_gradient(x)))


def grid_states(system: HamiltonianSystem, grid: GridSpec | None = None) -> np.ndarray:
    grid = grid if grid is not None else system.default_grid
    if grid is None:
        raise ValueError(f"no grid given and {system.label} has no default validation grid")
    return grid.states(system.domain, system.coords)


def reversibility_defect(system: HamiltonianSystem, grid: GridSpec | None = None) -> float:
    """Largest ``|H - H*|`` over the grid's interior phase points."""
    grid = grid if grid is not None else system.default_grid
    xs = grid_states(system, grid)
    ps = grid.momenta(system.coords)
    star = adjoint(system)

    def defect(x, p):
        return np.abs(system.H(x, p) - star.H(x, p))

    return chunked_max(defect, xs, ps)


@dataclass(frozen=True)
class TiltedDecomposition:
    cost: np.ndarray
    rest_cost: np.ndarray
    tilted_cost: np.ndarray
    entropy_term: np.ndarray

    @property
    def residual(self) -> np.ndarray:
        return np.abs(self.cost - self.rest_cost - self.tilted_cost - self.entropy_term)


def psi(system: HamiltonianSystem, x, v) -> np.ndarray:
    """Tilted Lagrangian at its own tilt point."""
    x = system.require_interior(x)
    cost, _ = legendre_solve(tilted(system, x), x, v)
    return cost


def psi_star(system: HamiltonianSystem, x, p) -> np.ndarray:
    """Tilted Hamiltonian at its own tilt point."""
    x = system.require_interior(x)
    return tilted(system, x).H(x, np.asarray(p, dtype=float))


def tilted_decomposition(system: HamiltonianSystem, x, v) -> TiltedDecomposition:
    """All four terms of ``L(x,v) = L(x,0) + Psi(x,v) + <DS(x), v>/2`` at one state."""
    x = system.require_interior(np.asarray(x, dtype=float))
    v = np.asarray(v, dtype=float)
    cost, _ = legendre_solve(system, x, v)
    rest, _ = legendre_solve(system, x, np.zeros_like(v))
    tcost = psi(system, x, v)
    return TiltedDecomposition(cost, rest, tcost, 0.5 * _dot(system.entropy_gradient(x), v))


def tilted_decomposition_residual(system: HamiltonianSystem, x, v) -> float:
    return float(np.max(tilted_decomposition(system, x, v).residual))
