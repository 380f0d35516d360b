"""Entropy convexity along Hamilton trajectories.

All integrals are trapezoid sums over the trajectory nodes.  Along a
trajectory ``(x, p)`` the reversed cost rate is ``L*(x(s), -x'(s))`` where
``L*`` is the Lagrangian of the adjoint Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.legendre import legendre_solve
from ..core.system import HamiltonianSystem, adjoint, symmetrize
from ..errors import DomainError
from .hamilton import PhaseTrajectory, lagrangian_along


def green_kernel(T: float, s, t):
    """``s (T - t) / T`` for ``s <= t`` and ``t (T - s) / T`` otherwise."""
    if not T > 0:
        raise DomainError("horizon must be positive")
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    for name, v in (("s", s), ("t", t)):
        if np.any(v < 0.0) or np.any(v > T):
            raise DomainError(f"{name} must lie in [0, {T}]")
    out = np.where(s <= t, s * (T - t), t * (T - s)) / T
    return float(out) if out.ndim == 0 else out


def _require_interior_nodes(system: HamiltonianSystem, traj: PhaseTrajectory) -> np.ndarray:
    inside = system.domain.is_interior(traj.states)
    if not np.all(inside[1:-1]):
        k = int(np.argmin(inside[1:-1])) + 1
        raise DomainError(f"trajectory touches the boundary at interior node t={traj.times[k]:.6g}")
    return inside


def velocities(system: HamiltonianSystem, traj: PhaseTrajectory) -> np.ndarray:
    return system.H_p(traj.states, traj.momenta)


def reversed_cost_rate(system: HamiltonianSystem, traj: PhaseTrajectory, star=None) -> np.ndarray:
    """``L*(x(s), -x'(s))`` at interior nodes by a Legendre solve on the adjoint.

    The solve starts from ``DS(x) - p``, the exact maximiser.  Endpoints on
    the boundary take the value of their neighbour.
    """
    inside = _require_interior_nodes(system, traj)
    star = star if star is not None else adjoint(system)
    xs = traj.states[inside]
    ps = traj.momenta[inside]
    v = -system.H_p(xs, ps)
    guess = system.entropy_gradient(xs) - ps
    cost, _ = legendre_solve(star, xs, v, p_init=guess)
    out = np.full(len(traj.times), np.nan)
    out[inside] = cost
    if not inside[0]:
        out[0] = out[1]
    if not inside[-1]:
        out[-1] = out[-2]
    return out


def reversed_cost_rate_direct(system: HamiltonianSystem, traj: PhaseTrajectory) -> np.ndarray:
    """The same quantity from ``p* = DS - p`` without any solve."""
    star = adjoint(system)
    xs = system.require_interior(traj.states)
    pstar = system.entropy_gradient(xs) - traj.momenta
    return lagrangian_along(star, xs, pstar)


def _trapezoid(y, t):
    return float(np.sum(0.5 * np.diff(t) * (y[1:] + y[:-1])))


def _endpoint_derivatives(times, values):
    # second-order one-sided differences on the (uniform) node spacing
    h0 = times[1] - times[0]
    h1 = times[-1] - times[-2]
    if len(times) < 3:
        return (values[1] - values[0]) / h0, (values[-1] - values[-2]) / h1
    d0 = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h0)
    d1 = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h1)
    return d0, d1


@dataclass
class FormResult:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    def passed(self, tol: float) -> bool:
        return bool(np.all(self.margin >= -tol))

    def to_json(self) -> list[dict]:
        return [{"t": float(t), "lhs": float(a), "rhs": float(b), "margin": float(b - a)}
                for t, a, b in zip(self.times, self.lhs, self.rhs)]


@dataclass
class ConvexityReport:
    kappa: float
    tol: float
    forms: dict = field(default_factory=dict)

    def form_passed(self, name: str) -> bool:
        return self.forms[name].passed(self.tol)

    @property
    def passed(self) -> bool:
        return all(f.passed(self.tol) for f in self.forms.values())

    @property
    def worst_margin(self) -> float:
        return float(min(np.min(f.margin) for f in self.forms.values()))

    def to_json(self) -> dict:
        return {"kappa": self.kappa, "tol": self.tol, "passed": self.passed,
                "forms": {k: {"passed": f.passed(self.tol), "points": f.to_json()}
                          for k, f in self.forms.items()}}


def convexity_report(system: HamiltonianSystem, traj: PhaseTrajectory, kappa: float) -> ConvexityReport:
    """Residuals of the three integrated convexity forms along ``traj``.

    Every inequality is stored as ``lhs <= rhs``:

    * ``b``: ``S(x(t))`` against the chord minus ``kappa`` times the Green
      integral of ``L + L*``, at every node;
    * ``c``: the two endpoint slope bounds;
    * ``d``: ``kappa`` times the integral of ``L + L*`` against the change of
      slope between the endpoints.
    """
    system.require_entropy("the convexity report")
    t = traj.times
    T = float(t[-1] - t[0])
    tt = t - t[0]
    S = system.entropy(traj.states)
    if not np.all(np.isfinite(S)):
        raise DomainError("entropy is infinite along the trajectory")
    rate = lagrangian_along(system, traj.states, traj.momenta) + reversed_cost_rate(system, traj)
    S0, ST = float(S[0]), float(S[-1])
    tol = 1e-4 * (1.0 + abs(S0) + abs(ST))

    G = green_kernel(T, tt[None, :], tt[:, None])
    green_int = np.array([_trapezoid(rate * row, tt) for row in G])
    chord = (T - tt) / T * S0 + tt / T * ST
    form_b = FormResult(t.copy(), S.copy(), chord - kappa * green_int)

    dS0, dST = _endpoint_derivatives(tt, S)
    left = (ST - S0) / T - kappa * _trapezoid(rate * (T - tt) / T, tt)
    right = (S0 - ST) / T - kappa * _trapezoid(rate * tt / T, tt)
    form_c = FormResult(np.array([t[0], t[-1]]), np.array([dS0, -dST]), np.array([left, right]))

    total = _trapezoid(rate, tt)
    form_d = FormResult(np.array([t[-1]]), np.array([kappa * total]), np.array([dST - dS0]))
    return ConvexityReport(float(kappa), tol, {"b": form_b, "c": form_c, "d": form_d})


def entropy_derivative_identity_residual(system: HamiltonianSystem, traj: PhaseTrajectory) -> float:
    """Largest gap between the central difference of ``S`` and ``L(x, x') - L*(x, -x')``."""
    system.require_entropy("the entropy derivative identity")
    if len(traj.times) < 3:
        raise ValueError("need at least three nodes")
    S = system.entropy(traj.states)
    t = traj.times
    dS = (S[2:] - S[:-2]) / (t[2:] - t[:-2])
    forward = lagrangian_along(system, traj.states, traj.momenta)
    backward = reversed_cost_rate(system, traj)
    return float(np.max(np.abs(dS - (forward[1:-1] - backward[1:-1]))))


@dataclass(frozen=True)
class ReversalCheck:
    adjoint_residual: float
    symmetrized_residual: float

    @property
    def max(self) -> float:
        return max(self.adjoint_residual, self.symmetrized_residual)

    def to_json(self) -> dict:
        return {"adjoint_residual": self.adjoint_residual,
                "symmetrized_residual": self.symmetrized_residual, "max": self.max}


def _hamilton_residual(system: HamiltonianSystem, times, xs, ps) -> float:
    # central differences at interior nodes against (H_p, -H_x)
    dt = (times[2:] - times[:-2])[:, None]
    dx = (xs[2:] - xs[:-2]) / dt
    dp = (ps[2:] - ps[:-2]) / dt
    x, p = xs[1:-1], ps[1:-1]
    res_x = np.abs(dx - system.H_p(x, p))
    res_p = np.abs(dp + system.H_x(x, p))
    return float(max(np.max(res_x), np.max(res_p)))


def time_reversal_check(system: HamiltonianSystem, traj: PhaseTrajectory) -> ReversalCheck:
    """Hamilton residuals of the reversed and the symmetrized trajectories.

    The reversed path ``(x(T - t), DS(x(T - t)) - p(T - t))`` is tested
    against the adjoint Hamiltonian and ``(x(t), 2 p(t) - DS(x(t)))`` against
    the symmetrized one.  Only interior nodes enter.
    """
    system.require_entropy("the time-reversal check")
    if len(traj.times) < 3:
        raise ValueError("need at least three nodes")
    inside = _require_interior_nodes(system, traj)
    lo = 0 if inside[0] else 1
    hi = len(traj.times) if inside[-1] else len(traj.times) - 1
    t = traj.times[lo:hi]
    xs = traj.states[lo:hi]
    ps = traj.momenta[lo:hi]
    ds = system.entropy_gradient(xs)
    T = traj.times[-1]
    rev_t = T - t[::-1]
    rev_x = xs[::-1]
    rev_p = (ds - ps)[::-1]
    adj = _hamilton_residual(adjoint(system), rev_t, rev_x, rev_p)
    sym = _hamilton_residual(symmetrize(system), t, xs, 2.0 * ps - ds)
    return ReversalCheck(adj, sym)
