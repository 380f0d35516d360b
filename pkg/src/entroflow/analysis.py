"""Zero-cost flows, entropy decay and the entropy-information inequality."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from ._parallel import worker_count
from .core.domain import GridSpec, ProductDomain, SimplexDomain
from .core.pointwise import information, information_or_nan
from .core.system import HamiltonianSystem
from .errors import BoundaryTrapError, EmptyScanError, PreconditionError

DT_MIN = 1e-9


@dataclass
class FlowTrajectory:
    times: np.ndarray
    states: np.ndarray
    entropy: np.ndarray
    information: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def csv_header(self) -> list[str]:
        d = self.states.shape[1]
        return ["t"] + [f"x_{i + 1}" for i in range(d)] + ["S", "I"]

    def csv_rows(self) -> list[list]:
        rows = []
        for t, x, s, i in zip(self.times, self.states, self.entropy, self.information):
            rows.append([t, *x, s, "" if not np.isfinite(i) else i])
        return rows


@dataclass
class InequalityReport:
    kind: str
    kappa_estimate: float
    binding_point: dict
    n_grid: int
    n_excluded: int
    floor: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "kappa_estimate": self.kappa_estimate,
               "binding_point": self.binding_point, "n_grid": self.n_grid,
               "n_excluded": self.n_excluded, "floor": self.floor}
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class DecayReport:
    quantity: str
    kappa: float
    max_violation: float
    worst_time: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_json(self) -> dict:
        return {"quantity": self.quantity, "kappa": self.kappa, "max_violation": self.max_violation,
                "worst_time": self.worst_time, "tol": self.tol, "passed": self.passed}


def mckean_vlasov_field(system: HamiltonianSystem):
    def f(x):
        return system.H_p(x, np.zeros_like(x))
    return f


def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_mckean_vlasov(system: HamiltonianSystem, x0, T: float, dt: float,
                            dt_min: float = DT_MIN) -> FlowTrajectory:
    """Fixed-step RK4 for ``x' = H_p(x, 0)``; steps leaving the domain are halved and retried."""
    if not T > 0 or not dt > 0:
        raise ValueError("T and dt must be positive")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if not system.domain.contains(x):
        raise PreconditionError(f"starting point {x.tolist()} is outside the domain")
    f = mckean_vlasov_field(system)
    times, states = [0.0], [x.copy()]
    t = 0.0
    n_full = int(np.floor(T / dt + 1e-9))
    targets = [dt * (k + 1) for k in range(n_full)]
    if T - n_full * dt > 1e-12 * T:
        targets.append(T)
    for target in targets:
        while t < target - 1e-15:
            h = target - t
            while True:
                with np.errstate(all="ignore"):
                    y = _rk4_step(f, x, h)
                if np.all(np.isfinite(y)) and system.domain.contains(y):
                    break
                h *= 0.5
                if h < dt_min:
                    raise BoundaryTrapError(f"flow is pinned to the boundary at t={t:.6g}", time=t)
            x, t = y, t + h
        t = target
        times.append(t)
        states.append(x.copy())
    states = np.array(states)
    ent = system.entropy(states) if system.has_entropy else np.full(len(states), np.nan)
    info = information_or_nan(system, states) if system.has_entropy else np.full(len(states), np.nan)
    return FlowTrajectory(np.array(times), states, ent, info)


def _decay(values, times, kappa, offset, quantity, tol):
    v0 = values[0] - offset
    if tol is None:
        tol = 1e-6 * (abs(values[0]) + 1.0)
    finite = np.isfinite(values)
    viol = np.where(finite, (values - offset) - np.exp(-kappa * times) * v0, -np.inf)
    k = int(np.argmax(viol))
    return DecayReport(quantity, float(kappa), float(viol[k]), float(times[k]), float(tol))


def decay_check(traj: FlowTrajectory, kappa: float, S_inf: float = 0.0, tol: float | None = None) -> DecayReport:
    """Largest excess of ``S - S_inf`` over ``exp(-kappa t) (S(x_0) - S_inf)`` along the nodes."""
    if not np.isfinite(traj.entropy[0]):
        raise PreconditionError("entropy is infinite at the starting point")
    return _decay(traj.entropy, traj.times, kappa, S_inf, "entropy", tol)


def information_decay_check(traj: FlowTrajectory, kappa: float, tol: float | None = None) -> DecayReport:
    if not np.isfinite(traj.information[0]):
        raise PreconditionError("information is undefined at the starting point")
    return _decay(traj.information, traj.times, kappa, 0.0, "information", tol)


def _scan_states(system: HamiltonianSystem, grid: GridSpec | None) -> np.ndarray:
    grid = grid if grid is not None else system.default_grid
    return grid.states(system.domain, system.coords)


def _chunked(fn, xs, chunk=1 << 15):
    # threaded map over state chunks, preserving order
    chunks = [xs[i:i + chunk] for i in range(0, len(xs), chunk)]
    if worker_count() == 1 or len(chunks) <= 1:
        return np.concatenate([fn(c) for c in chunks]) if chunks else np.zeros(0)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return np.concatenate(list(pool.map(fn, chunks)))


def eii_estimate(system: HamiltonianSystem, grid: GridSpec | None = None,
                 s_floor: float = 1e-6, return_points: bool = False):
    """Infimum of ``I/S`` over grid states with ``S >= s_floor``."""
    system.require_entropy("the entropy-information scan")
    xs = _scan_states(system, grid)
    s = _chunked(system.entropy, xs)
    i = _chunked(lambda c: information(system, c), xs)
    keep = np.isfinite(s) & (s >= s_floor)
    if not keep.any():
        raise EmptyScanError(f"all {len(xs)} grid states have entropy below {s_floor}")
    ratio = np.full(len(xs), np.nan)
    ratio[keep] = i[keep] / s[keep]
    k = int(np.nanargmin(ratio))
    rep = InequalityReport("EII", float(ratio[k]) + 0.0, {"state": xs[k].tolist()}, len(xs),
                           int((~keep).sum()), float(s_floor))
    if return_points:
        return rep, xs, ratio
    return rep


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def second_order_terms(system: HamiltonianSystem, x):
    """``(rhs, weak_rhs, I)`` where ``rhs = <DS, H_px H_p> + <D2S H_p, H_p>`` at ``p = 0``."""
    x = system.require_interior(x)
    zero = np.zeros_like(x)
    ds = system.entropy_gradient(x)
    hp = system.H_p(x, zero)
    hpx = system.H_px(x, zero)
    d2s = system.entropy_hessian(x)
    weak = _dot(ds, np.einsum("...ij,...j->...i", hpx, hp))
    rhs = weak + _dot(np.einsum("...ij,...j->...i", d2s, hp), hp)
    return rhs, weak, -_dot(ds, hp)


def second_order_residual(system: HamiltonianSystem, x, kappa: float) -> np.ndarray:
    """``<DS, H_px H_p> + <D2S H_p, H_p> - kappa I`` at ``p = 0``; nonnegative where the bound holds."""
    rhs, _, info = second_order_terms(system, x)
    return rhs - kappa * info


def weak_second_order_residual(system: HamiltonianSystem, x, kappa: float) -> np.ndarray:
    """The same with the ``D2S`` term dropped, a sufficient criterion when ``S`` is convex."""
    _, weak, info = second_order_terms(system, x)
    return weak - kappa * info


def second_order_estimate(system: HamiltonianSystem, grid: GridSpec | None = None,
                          i_floor: float = 1e-8) -> InequalityReport:
    """Infimum of ``rhs / I`` over grid states with ``I >= i_floor``."""
    xs = _scan_states(system, grid)
    rhs, _, info = second_order_terms(system, xs)
    keep = np.isfinite(info) & (info >= i_floor)
    if not keep.any():
        raise EmptyScanError(f"all {len(xs)} grid states have information below {i_floor}")
    ratio = np.full(len(xs), np.nan)
    ratio[keep] = rhs[keep] / info[keep]
    k = int(np.nanargmin(ratio))
    return InequalityReport("second-order", float(ratio[k]), {"state": xs[k].tolist()}, len(xs),
                            int((~keep).sum()), float(i_floor))


def tangent_basis(domain) -> np.ndarray:
    """Orthonormal basis of the directions along which states in ``domain`` may move."""
    d = domain.dimension
    if isinstance(domain, SimplexDomain):
        q, _ = np.linalg.qr(np.eye(d) - 1.0 / d)
        return q[:, : d - 1]
    if isinstance(domain, ProductDomain):
        blocks, start = [], 0
        for f in domain.factors:
            sub = tangent_basis(f)
            blk = np.zeros((d, sub.shape[1]))
            blk[start:start + f.dimension] = sub
            blocks.append(blk)
            start += f.dimension
        return np.concatenate(blocks, axis=1)
    return np.eye(d)


def kappa_upper_bound(system: HamiltonianSystem, x_s, stationary_tol: float = 1e-8,
                      definite_tol: float = 1e-10, method: str = "taylor") -> float:
    """Upper bound on any entropy-information constant from the behaviour near ``x_s``.

    ``method="matrix"`` returns ``-2 lambda_min`` of the symmetric part of
    ``H_px(x_s, 0)``, the smallest ``c`` with ``c + 2 H_px`` positive
    definite.  ``method="taylor"`` (default) compares the quadratic parts of
    ``I`` and ``S`` directly: the smallest generalized eigenvalue of
    ``D2I = -(D2S H_px + H_px^T D2S)`` against ``D2S``.  Both agree in one
    dimension; the second is sharp when the eigendirections differ.
    """
    if method not in ("taylor", "matrix"):
        raise ValueError(f"unknown method {method!r}")
    x = system.require_interior(np.asarray(x_s, dtype=float).reshape(-1))
    zero = np.zeros_like(x)
    drift = system.H_p(x, zero)
    if np.linalg.norm(drift) >= stationary_tol:
        raise PreconditionError(f"{x.tolist()} is not stationary: |H_p(x, 0)| = {np.linalg.norm(drift):.3e}")
    Q = tangent_basis(system.domain)
    d2s_full = system.entropy_hessian(x)
    d2s = Q.T @ d2s_full @ Q
    d2s = 0.5 * (d2s + d2s.T)
    lam_s = np.linalg.eigvalsh(d2s)[0]
    if lam_s <= definite_tol:
        raise PreconditionError(f"entropy Hessian is not positive definite at {x.tolist()} "
                                f"(smallest eigenvalue {lam_s:.3e})")
    hpx = system.H_px(x, zero)
    if method == "matrix":
        sym = Q.T @ (0.5 * (hpx + hpx.T)) @ Q
        return float(-2.0 * np.linalg.eigvalsh(sym)[0])
    m = d2s_full @ hpx
    d2i = -(Q.T @ (m + m.T) @ Q)
    return float(eigh(d2i, d2s, eigvals_only=True)[0])
