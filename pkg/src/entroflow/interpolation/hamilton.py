"""Integration of the Hamilton equations ``x' = H_p``, ``p' = -H_x``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.system import HamiltonianSystem
from ..errors import DomainError


@dataclass
class PhaseTrajectory:
    times: np.ndarray
    states: np.ndarray
    momenta: np.ndarray
    hamiltonian_values: np.ndarray
    lagrangian: np.ndarray
    exited: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def lagrangian_steps(self) -> np.ndarray:
        """Trapezoid cost of each interval, aligned with the right node (0 at the first node)."""
        dt = np.diff(self.times)
        steps = 0.5 * dt * (self.lagrangian[1:] + self.lagrangian[:-1])
        return np.concatenate([[0.0], steps])

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.hamiltonian_values - self.hamiltonian_values[0])))

    def csv_header(self) -> list[str]:
        d = self.states.shape[1]
        return (["t"] + [f"x_{i + 1}" for i in range(d)] + [f"p_{i + 1}" for i in range(d)]
                + ["H", "L_step"])

    def csv_rows(self) -> list[list]:
        return [[t, *x, *p, h, l] for t, x, p, h, l in
                zip(self.times, self.states, self.momenta, self.hamiltonian_values, self.lagrangian_steps)]


def lagrangian_along(system: HamiltonianSystem, x, p) -> np.ndarray:
    """``<p, H_p(x, p)> - H(x, p)``, the cost rate of the velocity generated by ``p``."""
    return np.einsum("...i,...i->...", p, system.H_p(x, p)) - system.H(x, p)


def step_count(T: float, dt: float) -> int:
    return max(1, int(np.ceil(T / dt - 1e-9)))


ENERGY_BUDGET = 1e-7
MAX_HALVINGS = 24


def _rk4(field_, X, P, h):
    with np.errstate(all="ignore"):
        a1, b1 = field_(X, P)
        a2, b2 = field_(X + 0.5 * h * a1, P + 0.5 * h * b1)
        a3, b3 = field_(X + 0.5 * h * a2, P + 0.5 * h * b2)
        a4, b4 = field_(X + h * a3, P + h * b3)
        return X + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4), P + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)


def integrate_batch(system: HamiltonianSystem, X0, P0, T: float, dt: float):
    """RK4 for a batch of phase points on the uniform grid ``T / ceil(T/dt)``.

    Returns ``(times, xs, ps, alive, dead_at)`` with ``xs`` of shape
    ``(n+1, batch, d)``.  A step whose energy change exceeds its share of
    ``ENERGY_BUDGET * (1 + |H_0|)`` is redone with adaptive sub-steps; a
    member is marked dead from the first node it cannot reach inside the
    closed domain, and its later nodes are frozen at the last valid value.
    """
    X = np.array(X0, dtype=float)
    P = np.array(P0, dtype=float)
    n = step_count(T, dt)
    h = T / n
    xs = np.empty((n + 1,) + X.shape)
    ps = np.empty((n + 1,) + P.shape)
    xs[0], ps[0] = X, P
    alive = np.ones(X.shape[0], dtype=bool)
    dead_at = np.full(X.shape[0], n + 1)
    with np.errstate(all="ignore"):
        H0 = system.H(X, P)
    budget = ENERGY_BUDGET * (1.0 + np.abs(H0)) / n

    def field_(x, p):
        return system.H_p(x, p), -system.H_x(x, p)

    def valid(Xn, Pn, Hprev, allowed):
        with np.errstate(all="ignore"):
            Hn = system.H(Xn, Pn)
        ok = (np.all(np.isfinite(Xn), axis=-1) & np.all(np.isfinite(Pn), axis=-1)
              & system.domain.contains(Xn) & np.isfinite(Hn))
        return ok & (np.abs(Hn - Hprev) <= allowed)

    def refine(j, Xj, Pj):
        # adaptive halving across one grid interval for a single member
        t, hs = 0.0, 0.5 * h
        x, p = Xj.copy(), Pj.copy()
        hmin = h * 2.0 ** -MAX_HALVINGS
        while t < h * (1 - 1e-12):
            hs = min(hs, h - t)
            xn, pn = _rk4(field_, x[None], p[None], hs)
            Hp = system.H(x[None], p[None])
            if valid(xn, pn, Hp, budget[j] * hs / h)[0]:
                x, p, t = xn[0], pn[0], t + hs
                hs *= 2.0
            else:
                hs *= 0.5
                if hs < hmin:
                    return None
        return x, p

    with np.errstate(all="ignore"):
        Hk = system.H(X, P)
    for k in range(n):
        Xn, Pn = _rk4(field_, X, P, h)
        ok = valid(Xn, Pn, Hk, budget)
        for j in np.flatnonzero(alive & ~ok):
            res = refine(j, X[j], P[j])
            if res is not None:
                Xn[j], Pn[j] = res
                ok[j] = True
        newly_dead = alive & ~ok
        dead_at[newly_dead] = k + 1
        alive &= ok
        X = np.where(alive[:, None], Xn, X)
        P = np.where(alive[:, None], Pn, P)
        with np.errstate(all="ignore"):
            Hk = system.H(X, P)
        xs[k + 1], ps[k + 1] = X, P
    return np.linspace(0.0, T, n + 1), xs, ps, alive, dead_at


def hamilton_flow(system: HamiltonianSystem, x0, p0, T: float, dt: float,
                  allow_boundary_start: bool = False) -> PhaseTrajectory:
    """Integrate the Hamilton equations from ``(x0, p0)`` over ``[0, T]``.

    A trajectory that leaves the domain is truncated at its last valid node
    and flagged with ``exited``.
    """
    if not T > 0 or not dt > 0:
        raise ValueError("T and dt must be positive")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    p0 = np.asarray(p0, dtype=float).reshape(-1)
    if not system.domain.contains(x0) or (not allow_boundary_start and not system.domain.is_interior(x0)):
        raise DomainError(f"starting point {x0.tolist()} is not in the interior of the domain")
    times, xs, ps, alive, dead_at = integrate_batch(system, x0[None], p0[None], T, dt)
    xs, ps = xs[:, 0], ps[:, 0]
    exited = not bool(alive[0])
    if exited:
        m = int(dead_at[0])
        times, xs, ps = times[:m], xs[:m], ps[:m]
    return PhaseTrajectory(times, xs, ps, system.H(xs, ps), lagrangian_along(system, xs, ps), exited,
                           {"dt": float(times[1] - times[0]) if len(times) > 1 else float(dt)})


def interpolation_cost(traj: PhaseTrajectory) -> float:
    """Trapezoid quadrature of the cost rate along the trajectory."""
    return float(np.sum(traj.lagrangian_steps))
