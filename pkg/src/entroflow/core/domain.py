"""State domains and rectangular sampling grids.

All membership tests accept batches: an array of shape ``(..., d)`` yields a
boolean array of shape ``(...)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .._parallel import phase_pairs  # noqa: F401  (re-exported)

SIMPLEX_TOL = 1e-12
DEFAULT_MARGIN = 1e-3


class Domain:
    """Closed subset of R^d on which a Hamiltonian system lives."""

    dimension: int
    margin: float

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def is_interior(self, x, margin: float = 0.0) -> np.ndarray:
        """Strict interior test; ``margin`` keeps points away from the boundary."""
        raise NotImplementedError

    def boundary_points(self) -> list:
        return []


@dataclass(frozen=True)
class BoxDomain(Domain):
    lower: tuple
    upper: tuple
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise ValueError("lower and upper bounds differ in length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise ValueError("box lower bound must be strictly below upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unbounded(cls, d: int, margin: float = DEFAULT_MARGIN) -> "BoxDomain":
        return cls((-np.inf,) * d, (np.inf,) * d, margin)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = np.array(self.lower), np.array(self.upper)
        return np.all((x >= lo) & (x <= hi), axis=-1)

    def is_interior(self, x, margin=0.0):
        x = np.asarray(x, dtype=float)
        lo, hi = np.array(self.lower), np.array(self.upper)
        if margin > 0:
            return np.all((x >= lo + margin) & (x <= hi - margin), axis=-1)
        return np.all((x > lo) & (x < hi), axis=-1)

    @property
    def bounded(self) -> bool:
        return all(np.isfinite(self.lower)) and all(np.isfinite(self.upper))


@dataclass(frozen=True)
class SimplexDomain(Domain):
    """Probability vectors on a finite set of the given cardinality."""

    size: int
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.size < 2:
            raise ValueError("simplex needs at least two atoms")

    @property
    def dimension(self) -> int:
        return self.size

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return np.all(x >= 0, axis=-1) & (np.abs(x.sum(axis=-1) - 1.0) <= SIMPLEX_TOL * self.size)

    def is_interior(self, x, margin=0.0):
        x = np.asarray(x, dtype=float)
        on = np.abs(x.sum(axis=-1) - 1.0) <= SIMPLEX_TOL * self.size
        if margin > 0:
            return on & np.all(x >= margin, axis=-1)
        return on & np.all(x > 0, axis=-1)


@dataclass(frozen=True)
class ProductDomain(Domain):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dimension(self) -> int:
        return sum(f.dimension for f in self.factors)

    @property
    def margin(self) -> float:
        return min(f.margin for f in self.factors)

    def slices(self) -> list[slice]:
        out, start = [], 0
        for f in self.factors:
            out.append(slice(start, start + f.dimension))
            start += f.dimension
        return out

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        masks = [f.contains(x[..., s]) for f, s in zip(self.factors, self.slices())]
        return np.logical_and.reduce(masks)

    def is_interior(self, x, margin=0.0):
        x = np.asarray(x, dtype=float)
        masks = [f.is_interior(x[..., s], margin) for f, s in zip(self.factors, self.slices())]
        return np.logical_and.reduce(masks)


@dataclass(frozen=True)
class Chart:
    """Coordinates used to lay grids over a domain and its momenta.

    ``to_state`` maps ``(..., state_dim)`` to ``(..., d)``; ``to_momentum``
    maps ``(..., momentum_dim)`` to ``(..., d)``.
    """

    state_dim: int
    momentum_dim: int
    to_state: Callable
    to_momentum: Callable


def identity_chart(d: int) -> Chart:
    ident = lambda z: np.asarray(z, dtype=float)
    return Chart(d, d, ident, ident)


def simplex_chart(size: int) -> Chart:
    """Drop-last coordinates; momenta are pinned to zero in the last slot."""

    def to_state(z):
        z = np.asarray(z, dtype=float)
        return np.concatenate([z, 1.0 - z.sum(axis=-1, keepdims=True)], axis=-1)

    def to_momentum(z):
        z = np.asarray(z, dtype=float)
        return np.concatenate([z, np.zeros(z.shape[:-1] + (1,))], axis=-1)

    return Chart(size - 1, size - 1, to_state, to_momentum)


def product_chart(charts: Sequence[Chart]) -> Chart:
    charts = tuple(charts)

    def split(z, dims):
        out, start = [], 0
        for k in dims:
            out.append(z[..., start:start + k])
            start += k
        return out

    def to_state(z):
        z = np.asarray(z, dtype=float)
        parts = split(z, [c.state_dim for c in charts])
        return np.concatenate([c.to_state(part) for c, part in zip(charts, parts)], axis=-1)

    def to_momentum(z):
        z = np.asarray(z, dtype=float)
        parts = split(z, [c.momentum_dim for c in charts])
        return np.concatenate([c.to_momentum(part) for c, part in zip(charts, parts)], axis=-1)

    return Chart(sum(c.state_dim for c in charts), sum(c.momentum_dim for c in charts),
                 to_state, to_momentum)


def default_chart(domain: Domain) -> Chart:
    if isinstance(domain, SimplexDomain):
        return simplex_chart(domain.size)
    if isinstance(domain, ProductDomain):
        return product_chart([default_chart(f) for f in domain.factors])
    return identity_chart(domain.dimension)


@dataclass(frozen=True)
class Axis:
    """One grid axis: ``count`` evenly spaced values on ``[lo, hi]``, or explicit ``values``."""

    lo: float = 0.0
    hi: float = 1.0
    count: int = 2
    values: tuple | None = None

    def points(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.count < 1:
            raise ValueError("axis count must be positive")
        if self.count == 1:
            return np.array([0.5 * (self.lo + self.hi)])
        return np.linspace(self.lo, self.hi, self.count)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``"min:max:count"``."""
        parts = text.strip().split(":")
        if len(parts) != 3:
            raise ValueError(f"axis spec {text!r} is not min:max:count")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))

    def to_json(self):
        if self.values is not None:
            return {"values": list(self.values)}
        return [self.lo, self.hi, self.count]

    @classmethod
    def from_json(cls, obj) -> "Axis":
        if isinstance(obj, dict):
            return cls(values=tuple(float(v) for v in obj["values"]))
        if isinstance(obj, str):
            return cls.parse(obj)
        lo, hi, count = obj
        return cls(float(lo), float(hi), int(count))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling over chart coordinates of states and momenta."""

    state_axes: tuple
    momentum_axes: tuple = ()
    margin: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "state_axes", tuple(self.state_axes))
        object.__setattr__(self, "momentum_axes", tuple(self.momentum_axes))

    @classmethod
    def boxes(cls, state, momentum=(), margin=None) -> "GridSpec":
        """Build from ``[(lo, hi, count), ...]`` lists."""
        return cls(tuple(Axis(*a) for a in state), tuple(Axis(*a) for a in momentum), margin)

    def _coords(self, axes) -> np.ndarray:
        pts = [a.points() for a in axes]
        mesh = np.meshgrid(*pts, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def states(self, domain: Domain, chart: Chart) -> np.ndarray:
        """Interior states of the grid, shape ``(n, d)``."""
        if len(self.state_axes) != chart.state_dim:
            raise ValueError(f"grid has {len(self.state_axes)} state axes, chart needs {chart.state_dim}")
        x = chart.to_state(self._coords(self.state_axes))
        margin = domain.margin if self.margin is None else self.margin
        return x[domain.is_interior(x, margin)]

    def momenta(self, chart: Chart) -> np.ndarray:
        if len(self.momentum_axes) != chart.momentum_dim:
            raise ValueError(
                f"grid has {len(self.momentum_axes)} momentum axes, chart needs {chart.momentum_dim}")
        return chart.to_momentum(self._coords(self.momentum_axes))

    @classmethod
    def parse(cls, text: str, state_dim: int) -> "GridSpec":
        """Parse ``"lo:hi:n;lo:hi:n;..."``; the first ``state_dim`` axes are states."""
        axes = [Axis.parse(t) for t in text.split(";") if t.strip()]
        return cls(tuple(axes[:state_dim]), tuple(axes[state_dim:]))

    def to_json(self):
        return {"state": [a.to_json() for a in self.state_axes],
                "momentum": [a.to_json() for a in self.momentum_axes],
                "margin": self.margin}

    @classmethod
    def from_json(cls, obj) -> "GridSpec":
        return cls(tuple(Axis.from_json(a) for a in obj.get("state", [])),
                   tuple(Axis.from_json(a) for a in obj.get("momentum", [])),
                   obj.get("margin"))


def lex_index(sizes: Sequence[int]) -> np.ndarray:
    """Lexicographic enumeration of a product of finite sets, first factor slowest."""
    return np.array(list(itertools.product(*[range(k) for k in sizes])), dtype=int).reshape(-1, len(sizes))
