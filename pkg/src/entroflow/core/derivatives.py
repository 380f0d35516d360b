"""Finite-difference cross-check of the analytic derivative bundle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DerivativeError
from .domain import GridSpec, phase_pairs
from .system import HamiltonianSystem

FD_STEP = 1e-5
FIELDS = ("H_p", "H_x", "H_pp", "H_px", "DS", "D2S")


@dataclass
class DerivativeReport:
    deviations: dict
    worst_points: dict
    rel_tol: float
    n_points: int
    skipped: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v < self.rel_tol for v in self.deviations.values())

    def to_json(self) -> dict:
        return {"passed": self.passed, "rel_tol": self.rel_tol, "n_points": self.n_points,
                "deviations": dict(self.deviations),
                "worst_points": {k: v for k, v in self.worst_points.items()},
                "skipped": list(self.skipped)}


def central_difference(f, z: np.ndarray, k: int) -> np.ndarray:
    """Central difference of ``f`` along coordinate ``k``, batched over rows of ``z``."""
    h = FD_STEP * np.maximum(1.0, np.abs(z[..., k]))
    zp = z.copy()
    zm = z.copy()
    zp[..., k] += h
    zm[..., k] -= h
    fp, fm = np.asarray(f(zp)), np.asarray(f(zm))
    return (fp - fm) / (2.0 * h.reshape(h.shape + (1,) * (fp.ndim - h.ndim)))


def _rel_dev(analytic, fd) -> np.ndarray:
    a = np.asarray(analytic)
    dev = np.abs(a - fd) / np.maximum(1.0, np.abs(a))
    return dev.reshape(dev.shape[0], -1).max(axis=1)


def _jacobian_fd(f, z, d):
    cols = [central_difference(f, z, k) for k in range(d)]
    return np.stack(cols, axis=-1)


def verify_derivatives(system: HamiltonianSystem, grid: GridSpec | None = None,
                       rel_tol: float = 1e-5, chunk: int = 4096) -> DerivativeReport:
    grid = grid if grid is not None else system.default_grid
    chart = system.coords
    xs = grid.states(system.domain, chart)
    ps = grid.momenta(chart)
    d = system.dimension
    worst = {k: 0.0 for k in FIELDS}
    where = {k: None for k in FIELDS}
    skipped: list = []
    if not system.has_entropy:
        for k in ("DS", "D2S"):
            worst.pop(k)
            where.pop(k)
        skipped.append("entropy fields: system has no entropy")

    def record(name, dev, points):
        i = int(np.argmax(dev))
        if where[name] is None or dev[i] > worst[name]:
            worst[name] = float(dev[i])
            where[name] = np.atleast_1d(points[i]).tolist()

    for x, p in phase_pairs(xs, ps, chunk):
        h = system.H(x, p)
        if not np.all(np.isfinite(h)):
            i = int(np.flatnonzero(~np.isfinite(h))[0])
            raise DerivativeError(f"H is not finite at x={x[i].tolist()}, p={p[i].tolist()}",
                                  point=(x[i].tolist(), p[i].tolist()))
        pts = np.concatenate([x, p], axis=-1)
        record("H_p", _rel_dev(system.H_p(x, p), _jacobian_fd(lambda q: system.H(x, q), p, d)), pts)
        record("H_x", _rel_dev(system.H_x(x, p), _jacobian_fd(lambda y: system.H(y, p), x, d)), pts)
        record("H_pp", _rel_dev(system.H_pp(x, p), _jacobian_fd(lambda q: system.H_p(x, q), p, d)), pts)
        record("H_px", _rel_dev(system.H_px(x, p), _jacobian_fd(lambda y: system.H_p(y, p), x, d)), pts)

    if system.has_entropy:
        for start in range(0, len(xs), chunk):
            x = xs[start:start + chunk]
            record("DS", _rel_dev(system.DS(x), _jacobian_fd(system.S, x, d)), x)
            record("D2S", _rel_dev(system.D2S(x), _jacobian_fd(system.DS, x, d)), x)

    return DerivativeReport(worst, where, rel_tol, len(xs) * len(ps), skipped)
