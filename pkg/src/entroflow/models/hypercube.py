"""Mean-field interacting walkers on the hypercube ``{-1, 1}^N``."""
from __future__ import annotations

from dataclasses import replace

from ..core.domain import Axis, GridSpec
from ..core.system import HamiltonianSystem
from ..errors import ConfigError
from ..tensor import ProjectionMap, empirical_product
from .curie_weiss import curie_weiss_two_state

MAX_N = 12


def hypercube(N: int, beta: float) -> HamiltonianSystem:
    """Empirical product of ``N`` two-state Curie-Weiss factors, each on time scale ``1/N``."""
    if not isinstance(N, int) or not 1 <= N <= MAX_N:
        raise ConfigError(f"hypercube dimension must be an integer in [1, {MAX_N}], got {N!r}")
    factors = [curie_weiss_two_state(beta) for _ in range(N)]
    system = empirical_product(factors, ProjectionMap((2,) * N), [1.0 / N] * N)
    k = {1: 21, 2: 11}.get(N, 5 if N == 3 else 3)
    grid = GridSpec(tuple(Axis(-0.9, 0.9, k) for _ in range(N)),
                    tuple(Axis(-1.0, 1.0, k) for _ in range(N)), margin=1e-9)
    return replace(system, default_grid=grid, label=f"hypercube(N={N}, beta={float(beta):g})",
                   extras={**system.extras, "N": N, "beta": float(beta),
                           "kappa": 4.0 * (1.0 - beta) / N if beta <= 1 else None})
