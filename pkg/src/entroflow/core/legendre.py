"""Convex conjugation in the momentum variable.

``L(x, v) = sup_p <p, v> - H(x, p)`` is computed by damped Newton on the
strictly convex objective ``g(p) = H(x, p) - <p, v>``.  Solves are batched
over leading dimensions.
"""
from __future__ import annotations

import numpy as np

from ..errors import LegendreError, UnsupportedOperationError
from .system import HamiltonianSystem

ARMIJO_C = 1e-4
MAX_BACKTRACK = 60


def _newton_direction(hess: np.ndarray, grad: np.ndarray) -> np.ndarray:
    # pseudo-inverse copes with the flat direction of simplex momenta and
    # with Hamiltonians that are only affine in some momenta
    return -np.einsum("...ij,...j->...i", np.linalg.pinv(hess, rcond=1e-13, hermitian=True), grad)


def legendre_solve(system: HamiltonianSystem, x, v, p_init=None, max_iter: int = 100,
                   tol: float = 1e-11):
    """Return ``(L, p_star)`` with ``H_p(x, p_star) = v``.

    Raises :class:`LegendreError` when Newton fails (the last iterate is
    attached) and :class:`UnsupportedOperationError` when a Hamiltonian that
    is not strictly convex is asked for a velocity it cannot produce.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    shape = np.broadcast_shapes(x.shape, v.shape)
    x = np.broadcast_to(x, shape).reshape(-1, shape[-1])
    v = np.broadcast_to(v, shape).reshape(-1, shape[-1])
    if p_init is None:
        p = np.zeros_like(v)
    else:
        p = np.array(np.broadcast_to(np.asarray(p_init, dtype=float), shape).reshape(-1, shape[-1]))

    scale = tol * (1.0 + np.max(np.abs(v), axis=-1))

    def objective(xx, pp, vv):
        return system.H(xx, pp) - np.einsum("...i,...i->...", pp, vv)

    active = np.ones(len(p), dtype=bool)
    for _ in range(max_iter):
        g = system.H_p(x[active], p[active]) - v[active]
        done = np.max(np.abs(g), axis=-1) <= scale[active]
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
        idx = idx[~done]
        g = g[~done]
        xa, va, pa = x[idx], v[idx], p[idx]
        step = _newton_direction(system.H_pp(xa, pa), g)
        slope = np.einsum("...i,...i->...", g, step)
        f0 = objective(xa, pa, va)
        t = np.ones(len(idx))
        accepted = np.zeros(len(idx), dtype=bool)
        for _ in range(MAX_BACKTRACK):
            trial = pa + t[:, None] * step
            with np.errstate(over="ignore", invalid="ignore"):
                f1 = objective(xa, trial, va)
            ok = np.isfinite(f1) & (f1 <= f0 + ARMIJO_C * t * slope + 1e-15 * np.abs(f0))
            # close to the optimum the objective is flat to rounding; accept a
            # step that still shrinks the gradient
            near = np.isfinite(f1) & ~ok & ~accepted
            if near.any():
                with np.errstate(over="ignore", invalid="ignore"):
                    g1 = system.H_p(xa[near], trial[near]) - va[near]
                shrink = np.max(np.abs(g1), axis=-1) < 0.5 * np.max(np.abs(g[near]), axis=-1)
                ok[np.flatnonzero(near)[shrink]] = True
            newly = ok & ~accepted
            pa[newly] = trial[newly]
            accepted |= ok
            if accepted.all():
                break
            t = np.where(accepted, t, 0.5 * t)
        # a rejected line search still takes the tiny step so progress is not lost
        pa[~accepted] = pa[~accepted] + t[~accepted, None] * step[~accepted]
        p[idx] = pa
    if active.any():
        g = system.H_p(x[active], p[active]) - v[active]
        bad = int(np.flatnonzero(active)[0])
        if not system.strictly_convex:
            raise UnsupportedOperationError(
                f"{system.label or 'system'} is not strictly convex in the momentum; velocity "
                f"{v[bad].tolist()} is outside the range of H_p (residual {np.max(np.abs(g)):.3e})")
        raise LegendreError(
            f"Legendre solve did not converge in {max_iter} iterations at x={x[bad].tolist()}, "
            f"v={v[bad].tolist()} (residual {np.max(np.abs(g)):.3e})",
            last_iterate=p[bad].copy())
    cost = np.einsum("...i,...i->...", p, v) - system.H(x, p)
    return cost.reshape(shape[:-1]), p.reshape(shape)


def lagrangian(system: HamiltonianSystem, x, v, **kw):
    """Cost of moving from ``x`` with velocity ``v``, and the dual momentum."""
    return legendre_solve(system, x, v, **kw)

