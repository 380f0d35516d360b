"""Numerical evidence that one-dimensional interpolations avoid the boundary.

Four conditions are probed on a closed interval ``[a, b]``: reversibility,
inward drift at both ends, monotonicity of the rest cost ``L(x, 0)`` and of
``S`` near the ends, and divergence of ``L(x, 0)`` relative to ``S`` at the
ends.  The divergence is measured through the derivative ratio
``L'(x, 0) / S'(x)`` with ``L'(x, 0) = -H_x(x, p_hat)``, ``p_hat`` the
minimiser of ``H(x, .)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.domain import BoxDomain
from ..core.legendre import legendre_solve
from ..core.pointwise import reversibility_defect
from ..core.system import HamiltonianSystem
from ..errors import DomainError, LegendreError

NEIGHBOURHOOD = 0.05
DIVERGENCE_THRESHOLD = 1e3
DEFECT_TOL = 1e-8


@dataclass
class Condition:
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"passed": self.passed, **self.detail}


@dataclass
class InteriorReport:
    conditions: dict
    probes: list
    skipped: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "conditions": {k: c.to_json() for k, c in self.conditions.items()},
                "probes": self.probes, "skipped": self.skipped}


def _rest_cost(system, x):
    """``(L(x, 0), p_hat)`` at a single state, started from ``DS(x) / 2``."""
    xv = np.array([x])
    guess = 0.5 * system.entropy_gradient(xv)
    cost, p = legendre_solve(system, xv, np.zeros(1), p_init=guess)
    return float(cost), p


def _probe_side(system, end, inward, deltas, skipped):
    rows = []
    for delta in deltas:
        x = end + inward * delta
        try:
            cost, p = _rest_cost(system, x)
        except LegendreError:
            skipped.append({"x": x, "delta": delta})
            continue
        xv = np.array([x])
        slope_L = -float(system.H_x(xv, p)[0])
        slope_S = float(system.entropy_gradient(xv)[0])
        rows.append({"x": x, "delta": delta, "L": cost, "S": float(system.entropy(xv)),
                     "ratio": slope_L / slope_S if slope_S != 0 else np.inf})
    return rows


def _monotone(values, increasing):
    d = np.diff(values)
    return bool(np.all(d > 0) if increasing else np.all(d < 0))


def interior_assumption_check(system_1d: HamiltonianSystem, n_probe: int = 8) -> InteriorReport:
    """Probe the four boundary conditions on the points ``end +- 0.05 * 10**-k``."""
    system = system_1d
    dom = system.domain
    if not isinstance(dom, BoxDomain) or dom.dimension != 1 or not dom.bounded:
        raise DomainError("the boundary check needs a bounded one-dimensional interval")
    system.require_entropy("the boundary check")
    if n_probe < 2:
        raise ValueError("need at least two probe points")
    a, b = dom.lower[0], dom.upper[0]
    deltas = NEIGHBOURHOOD * 10.0 ** -np.arange(n_probe)
    skipped: list = []
    conditions = {}

    defect = reversibility_defect(system)
    conditions["a"] = Condition(defect < DEFECT_TOL, {"defect": defect, "tol": DEFECT_TOL})

    drift = {}
    for name, end, inward in (("lower", a, 1.0), ("upper", b, -1.0)):
        with np.errstate(all="ignore"):
            v = float(system.H_p(np.array([end]), np.zeros(1))[0])
        if not np.isfinite(v):
            v = float(system.H_p(np.array([end + inward * deltas[-1]]), np.zeros(1))[0])
        drift[name] = v
    conditions["b"] = Condition(drift["lower"] > 0 and drift["upper"] < 0, {"drift": drift})

    sides = {"lower": _probe_side(system, a, 1.0, deltas, skipped),
             "upper": _probe_side(system, b, -1.0, deltas, skipped)}

    mono = {}
    ok_c = True
    for name, end, inward in (("lower", a, 1.0), ("upper", b, -1.0)):
        near = np.concatenate([np.linspace(NEIGHBOURHOOD, deltas[-1], 25), deltas])
        near = np.unique(near)
        rows = _probe_side(system, end, inward, near, skipped)
        xs = np.array([r["x"] for r in rows])
        order = np.argsort(xs)
        L = np.array([r["L"] for r in rows])[order]
        S = np.array([r["S"] for r in rows])[order]
        # decreasing next to the lower end, increasing next to the upper end
        increasing = inward < 0
        side_ok = len(rows) >= 2 and _monotone(L, increasing) and _monotone(S, increasing)
        mono[name] = {"L_monotone": _monotone(L, increasing) if len(rows) >= 2 else False,
                      "S_monotone": _monotone(S, increasing) if len(rows) >= 2 else False}
        ok_c &= side_ok
    conditions["c"] = Condition(ok_c, mono)

    div = {}
    ok_d = True
    for name, rows in sides.items():
        ratios = np.array([r["ratio"] for r in rows])
        complete = len(rows) == n_probe
        increasing = len(ratios) >= 2 and bool(np.all(np.diff(ratios) > 0))
        last = float(ratios[-1]) if len(ratios) else float("nan")
        side_ok = complete and increasing and last > DIVERGENCE_THRESHOLD
        div[name] = {"ratios": ratios.tolist(), "increasing": increasing, "last": last,
                     "complete": complete}
        ok_d &= side_ok
    conditions["d"] = Condition(ok_d, {"threshold": DIVERGENCE_THRESHOLD, **div})

    probes = [dict(r, side=name) for name, rows in sides.items() for r in rows]
    return InteriorReport(conditions, probes, skipped)
