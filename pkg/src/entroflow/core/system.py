"""The Hamiltonian-entropy system abstraction.

Every callable is batched: states and momenta have shape ``(..., d)``;
scalars come back with shape ``(...)``, gradients ``(..., d)`` and matrices
``(..., d, d)``.  ``H_px[..., i, j]`` is the mixed partial in ``p_i`` then
``x_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..errors import DomainError, MissingEntropyError
from .domain import Chart, Domain, GridSpec, default_chart


@dataclass(frozen=True)
class HamiltonianEval:
    value: np.ndarray
    grad_p: np.ndarray
    grad_x: np.ndarray
    hess_pp: np.ndarray
    hess_px: np.ndarray


@dataclass(frozen=True)
class HamiltonianSystem:
    domain: Domain
    H: Callable
    H_p: Callable
    H_x: Callable
    H_pp: Callable
    H_px: Callable
    S: Optional[Callable] = None
    DS: Optional[Callable] = None
    D2S: Optional[Callable] = None
    label: str = ""
    reversible: bool = False
    strictly_convex: bool = True
    chart: Optional[Chart] = None
    default_grid: Optional[GridSpec] = None
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def coords(self) -> Chart:
        return self.chart if self.chart is not None else default_chart(self.domain)

    @property
    def has_entropy(self) -> bool:
        return self.S is not None and self.DS is not None and self.D2S is not None

    def require_entropy(self, what: str = "this operation") -> None:
        if not self.has_entropy:
            raise MissingEntropyError(f"{what} needs an entropy, but {self.label or 'the system'} has none")

    def require_interior(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = self.domain.is_interior(x)
        if not np.all(inside):
            bad = x[~inside] if x.ndim > 1 else x
            raise DomainError(f"state {np.asarray(bad).reshape(-1, x.shape[-1])[0].tolist()} "
                              f"is not in the interior of the domain of {self.label or 'the system'}")
        return x

    def entropy(self, x) -> np.ndarray:
        """S at ``x``; IEEE ``inf`` where the entropy diverges."""
        self.require_entropy("entropy evaluation")
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.asarray(self.S(x), dtype=float)
        return np.where(np.isnan(s), np.inf, s)

    def entropy_gradient(self, x) -> np.ndarray:
        self.require_entropy("the entropy gradient")
        return np.asarray(self.DS(self.require_interior(x)), dtype=float)

    def entropy_hessian(self, x) -> np.ndarray:
        self.require_entropy("the entropy Hessian")
        return np.asarray(self.D2S(self.require_interior(x)), dtype=float)

    def evaluate(self, x, p) -> HamiltonianEval:
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        return HamiltonianEval(self.H(x, p), self.H_p(x, p), self.H_x(x, p),
                               self.H_pp(x, p), self.H_px(x, p))

    def with_entropy(self, S, DS, D2S, **changes) -> "HamiltonianSystem":
        return replace(self, S=S, DS=DS, D2S=D2S, **changes)

    def relabel(self, label: str) -> "HamiltonianSystem":
        return replace(self, label=label)


def _interior_ds(system: HamiltonianSystem):
    def ds(x):
        return system.entropy_gradient(x)
    return ds


def adjoint(system: HamiltonianSystem) -> HamiltonianSystem:
    """The system with Hamiltonian ``H(x, DS(x) - p)`` and the same entropy."""
    system.require_entropy("the adjoint Hamiltonian")
    ds = _interior_ds(system)
    base = system

    def q_of(x, p):
        return ds(x) - np.asarray(p, dtype=float)

    def H(x, p):
        return base.H(x, q_of(x, p))

    def H_p(x, p):
        return -base.H_p(x, q_of(x, p))

    def H_x(x, p):
        q = q_of(x, p)
        return base.H_x(x, q) + np.einsum("...ij,...i->...j", base.D2S(x), base.H_p(x, q))

    def H_pp(x, p):
        return base.H_pp(x, q_of(x, p))

    def H_px(x, p):
        q = q_of(x, p)
        return -(base.H_px(x, q) + base.H_pp(x, q) @ base.D2S(x))

    return replace(system, H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
                   label=f"adjoint({system.label})", extras={"base": system})


def symmetrize(system: HamiltonianSystem) -> HamiltonianSystem:
    """The system with Hamiltonian ``2 H(x, (p + DS(x)) / 2)``."""
    system.require_entropy("the symmetrized Hamiltonian")
    ds = _interior_ds(system)
    base = system

    def r_of(x, p):
        return 0.5 * (np.asarray(p, dtype=float) + ds(x))

    def H(x, p):
        return 2.0 * base.H(x, r_of(x, p))

    def H_p(x, p):
        return base.H_p(x, r_of(x, p))

    def H_x(x, p):
        r = r_of(x, p)
        return 2.0 * base.H_x(x, r) + np.einsum("...ij,...i->...j", base.D2S(x), base.H_p(x, r))

    def H_pp(x, p):
        return 0.5 * base.H_pp(x, r_of(x, p))

    def H_px(x, p):
        r = r_of(x, p)
        return base.H_px(x, r) + 0.5 * base.H_pp(x, r) @ base.D2S(x)

    return replace(system, H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
                   label=f"symmetrized({system.label})", extras={"base": system})


def tilted(system: HamiltonianSystem, x_tilt) -> HamiltonianSystem:
    """Momentum-shifted Hamiltonian ``H(y, p + DS(x)/2) - H(y, DS(x)/2)``.

    The shift is frozen at ``x_tilt``, so ``x_tilt`` is a rest point of the
    tilted zero-cost flow.
    """
    system.require_entropy("the tilted Hamiltonian")
    shift = 0.5 * system.entropy_gradient(np.asarray(x_tilt, dtype=float))
    base = system

    def H(y, p):
        return base.H(y, np.asarray(p, dtype=float) + shift) - base.H(y, np.broadcast_to(shift, np.shape(p)))

    def H_p(y, p):
        return base.H_p(y, np.asarray(p, dtype=float) + shift)

    def H_x(y, p):
        return base.H_x(y, np.asarray(p, dtype=float) + shift) - base.H_x(y, np.broadcast_to(shift, np.shape(p)))

    def H_pp(y, p):
        return base.H_pp(y, np.asarray(p, dtype=float) + shift)

    def H_px(y, p):
        return base.H_px(y, np.asarray(p, dtype=float) + shift)

    return replace(system, H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
                   S=None, DS=None, D2S=None, reversible=False,
                   label=f"tilted({system.label})", extras={"base": system, "shift": shift})
