"""Overdamped diffusion in a convex potential (Ornstein-Uhlenbeck for quadratic ``V``)."""
from __future__ import annotations

import numpy as np

from ..core.domain import Axis, BoxDomain, GridSpec
from ..core.system import HamiltonianSystem
from .potential import Potential, parse_potential


def ornstein_uhlenbeck(V_spec=None, domain: tuple | None = None) -> HamiltonianSystem:
    """``H = |p|^2/2 - <p, grad V>`` with entropy ``2V``.

    ``domain`` optionally restricts the state space to a box ``(lower, upper)``;
    this exists for exercising boundary checks, not for the inequality suites.
    """
    V: Potential = parse_potential(V_spec if V_spec is not None else {"quadratic": [[1.0]]})
    d = V.dimension

    def H(x, p):
        p = np.asarray(p, dtype=float)
        return 0.5 * np.sum(p * p, axis=-1) - np.sum(p * V.grad(x), axis=-1)

    def H_p(x, p):
        return np.asarray(p, dtype=float) - V.grad(x)

    def H_x(x, p):
        return -np.einsum("...ij,...i->...j", V.hess(x), np.asarray(p, dtype=float))

    def H_pp(x, p):
        shape = np.broadcast_shapes(np.shape(x), np.shape(p))[:-1]
        return np.broadcast_to(np.eye(d), shape + (d, d)).copy()

    def H_px(x, p):
        shape = np.broadcast_shapes(np.shape(x), np.shape(p))[:-1]
        return np.broadcast_to(-V.hess(x), shape + (d, d)).copy()

    if domain is None:
        dom = BoxDomain.unbounded(d)
        lo, hi = [-2.0] * d, [2.0] * d
    else:
        dom = BoxDomain(tuple(domain[0]), tuple(domain[1]))
        lo, hi = list(dom.lower), list(dom.upper)
    n_state = 21 if d == 1 else 7
    n_mom = 21 if d == 1 else 5
    grid = GridSpec(tuple(Axis(a, b, n_state) for a, b in zip(lo, hi)),
                    tuple(Axis(-2.0, 2.0, n_mom) for _ in range(d)))
    return HamiltonianSystem(
        domain=dom, H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
        S=lambda x: 2.0 * V.value(x), DS=lambda x: 2.0 * V.grad(x), D2S=lambda x: 2.0 * V.hess(x),
        label=f"ornstein_uhlenbeck(d={d})", reversible=True, default_grid=grid,
        extras={"potential": V, "lambda_min": V.min_curvature()})
