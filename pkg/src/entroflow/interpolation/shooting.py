"""Single shooting for the two-point problem ``x(0) = x0``, ``x(T) = xT``."""
from __future__ import annotations

import itertools

import numpy as np

from ..analysis import tangent_basis
from ..core.system import HamiltonianSystem
from ..errors import ShootingError, UnsupportedOperationError
from .hamilton import PhaseTrajectory, hamilton_flow, integrate_batch, interpolation_cost

FD_STEP = 1e-6
MAX_RADIUS = 10.0
MIN_RADIUS = 1e-12
DISTINCT = 1e-4
MAX_STARTS = 125


class _ShootingMap:
    """Endpoint miss as a function of the initial momentum in tangent coordinates."""

    def __init__(self, system, x0, xT, T, dt):
        self.system = system
        self.x0 = x0
        self.xT = xT
        self.T = T
        self.dt = dt
        self.Q = tangent_basis(system.domain)
        self.exits = 0

    def residuals(self, Z):
        """Misses for a batch of tangent momenta; rows that leave the domain get ``inf``."""
        Z = np.atleast_2d(Z)
        P0 = Z @ self.Q.T
        X0 = np.broadcast_to(self.x0, P0.shape)
        _, xs, _, alive, _ = integrate_batch(self.system, X0, P0, self.T, self.dt)
        F = (xs[-1] - self.xT) @ self.Q
        F[~alive] = np.inf
        self.exits += int((~alive).sum())
        return F

    def value_and_jacobian(self, z):
        k = len(z)
        Z = np.vstack([z[None, :], z[None, :] + FD_STEP * np.eye(k)])
        F = self.residuals(Z)
        f0 = F[0]
        J = (F[1:] - f0).T / FD_STEP
        return f0, J


def _newton(smap: _ShootingMap, z0, pos_tol, max_iter):
    z = np.asarray(z0, dtype=float).copy()
    f, J = smap.value_and_jacobian(z)
    if not np.all(np.isfinite(f)):
        return z, np.inf, False, 0
    radius = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        err = float(np.max(np.abs(f)))
        if err <= pos_tol:
            return z, err, True, it
        if not np.all(np.isfinite(J)):
            return z, err, False, it
        step = np.linalg.lstsq(J, -f, rcond=None)[0]
        norm = float(np.linalg.norm(step))
        accepted = False
        while radius >= MIN_RADIUS:
            trial_step = step if norm <= radius else step * (radius / norm)
            ft = smap.residuals(z + trial_step)[0]
            if np.all(np.isfinite(ft)) and np.linalg.norm(ft) < np.linalg.norm(f):
                z = z + trial_step
                if np.linalg.norm(ft) < 0.5 * np.linalg.norm(f):
                    radius = min(2.0 * radius, MAX_RADIUS)
                accepted = True
                break
            radius *= 0.25
        if not accepted:
            return z, err, False, it
        f, J = smap.value_and_jacobian(z)
    err = float(np.max(np.abs(f)))
    return z, err, err <= pos_tol, it


def _start_grid(k: int, points: int, half_width: float, rng) -> np.ndarray:
    axis = np.linspace(-half_width, half_width, points)
    if points ** k <= MAX_STARTS:
        return np.array(list(itertools.product(axis, repeat=k)))
    return rng.choice(axis, size=(MAX_STARTS, k))


def shoot(system: HamiltonianSystem, x0, xT, T: float, dt: float, pos_tol: float = 1e-8,
          p0_guess=None, max_iter: int = 50, multistart: bool = True, seed: int = 0) -> PhaseTrajectory:
    """Find the cheapest Hamilton trajectory found from ``x0`` to ``xT`` in time ``T``.

    Newton runs on a coarse step first and is then polished at ``dt``.  When
    it stalls, a grid of initial momenta is tried.  ``diagnostics`` lists
    every distinct converged solution.
    """
    if not system.strictly_convex:
        raise UnsupportedOperationError(
            f"shooting needs a Hamiltonian strictly convex in the momentum; {system.label} is degenerate")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    xT = np.asarray(xT, dtype=float).reshape(-1)
    for name, pt in (("x0", x0), ("xT", xT)):
        if not system.domain.contains(pt):
            raise ShootingError(f"endpoint {name}={pt.tolist()} is outside the domain")
    fine = _ShootingMap(system, x0, xT, T, dt)
    coarse_dt = max(dt, T / 100.0)
    coarse = _ShootingMap(system, x0, xT, T, coarse_dt) if coarse_dt > dt else None
    k = fine.Q.shape[1]
    rng = np.random.default_rng(seed)

    def attempt(z_init):
        z = np.asarray(z_init, dtype=float)
        if coarse is not None:
            zc, errc, okc, _ = _newton(coarse, z, max(pos_tol, 1e-6), max_iter)
            if np.isfinite(errc):
                z = zc
        return _newton(fine, z, pos_tol, max_iter)

    if p0_guess is None:
        z0 = np.zeros(k)
    else:
        z0 = np.asarray(p0_guess, dtype=float).reshape(-1) @ fine.Q
    solutions = []
    best_err = np.inf
    z, err, ok, iters = attempt(z0)
    best_err = min(best_err, err)
    if ok:
        solutions.append(z)
    n_starts = 1
    if not ok and multistart:
        for points, width in ((5, 3.0), (9, 6.0)):
            for start in _start_grid(k, points, width, rng):
                z, err, ok_s, _ = attempt(start)
                n_starts += 1
                best_err = min(best_err, err)
                if ok_s and all(np.max(np.abs(z - s)) > DISTINCT for s in solutions):
                    solutions.append(z)
            if solutions:
                break
    if not solutions:
        raise ShootingError(f"no shooting start converged from {x0.tolist()} to {xT.tolist()} "
                            f"(best endpoint miss {best_err:.3e})", best_residual=best_err,
                            diagnostics={"starts": n_starts, "exits": fine.exits})
    trajectories = []
    for zs in solutions:
        trajectories.append(hamilton_flow(system, x0, zs @ fine.Q.T, T, dt, allow_boundary_start=True))
    costs = [interpolation_cost(tr) for tr in trajectories]
    i = int(np.argmin(costs))
    best = trajectories[i]
    best.diagnostics.update({
        "solutions": [{"p0": (s @ fine.Q.T).tolist(), "cost": c} for s, c in zip(solutions, costs)],
        "starts": n_starts, "exits_discarded": fine.exits,
        "endpoint_miss": float(np.max(np.abs(best.states[-1] - xT))),
        "newton_iterations": iters, "selection": "cheapest converged solution found",
    })
    return best
