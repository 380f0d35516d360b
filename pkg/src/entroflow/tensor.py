"""Products of independent systems and empirical-measure products on product spaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core.domain import Chart, GridSpec, ProductDomain, SimplexDomain, lex_index, product_chart
from .core.system import HamiltonianSystem
from .errors import ConfigError

MAX_JOINT_SIZE = 4096


def _grid_product(grids) -> GridSpec | None:
    if any(g is None for g in grids):
        return None
    margins = [g.margin for g in grids if g.margin is not None]
    return GridSpec(tuple(a for g in grids for a in g.state_axes),
                    tuple(a for g in grids for a in g.momentum_axes),
                    min(margins) if margins else None)


def product(systems: Sequence[HamiltonianSystem]) -> HamiltonianSystem:
    """Independent product: ``H = sum_i H_i(x_i, p_i)`` and ``S = sum_i S_i(x_i)``."""
    systems = tuple(systems)
    if not systems:
        raise ConfigError("a product needs at least one factor")
    domain = ProductDomain(tuple(s.domain for s in systems))
    slices = domain.slices()
    d = domain.dimension

    def parts(z):
        z = np.asarray(z, dtype=float)
        return [z[..., s] for s in slices]

    def scalar_sum(name):
        def f(x, p):
            return sum(getattr(s, name)(xi, pi) for s, xi, pi in zip(systems, parts(x), parts(p)))
        return f

    def vector_cat(name):
        def f(x, p):
            outs = [getattr(s, name)(xi, pi) for s, xi, pi in zip(systems, parts(x), parts(p))]
            shape = np.broadcast_shapes(*[o.shape[:-1] for o in outs])
            return np.concatenate([np.broadcast_to(o, shape + o.shape[-1:]) for o in outs], axis=-1)
        return f

    def block(name):
        def f(x, p):
            outs = [getattr(s, name)(xi, pi) for s, xi, pi in zip(systems, parts(x), parts(p))]
            shape = np.broadcast_shapes(*[o.shape[:-2] for o in outs])
            res = np.zeros(shape + (d, d))
            for o, sl in zip(outs, slices):
                res[..., sl, sl] = o
            return res
        return f

    has_s = all(s.has_entropy for s in systems)
    S = DS = D2S = None
    if has_s:
        def S(x):
            return sum(s.S(xi) for s, xi in zip(systems, parts(x)))

        def DS(x):
            return np.concatenate([s.DS(xi) for s, xi in zip(systems, parts(x))], axis=-1)

        def D2S(x):
            x = np.asarray(x, dtype=float)
            res = np.zeros(x.shape[:-1] + (d, d))
            for s, xi, sl in zip(systems, parts(x), slices):
                res[..., sl, sl] = s.D2S(xi)
            return res

    return HamiltonianSystem(
        domain=domain, H=scalar_sum("H"), H_p=vector_cat("H_p"), H_x=vector_cat("H_x"),
        H_pp=block("H_pp"), H_px=block("H_px"), S=S, DS=DS, D2S=D2S,
        label="product(" + ", ".join(s.label for s in systems) + ")",
        reversible=all(s.reversible for s in systems),
        strictly_convex=all(s.strictly_convex for s in systems),
        chart=product_chart([s.coords for s in systems]),
        default_grid=_grid_product([s.default_grid for s in systems]),
        extras={"factors": systems, "slices": slices})


@dataclass(frozen=True)
class ProjectionMap:
    """Coordinate projections of a finite product set ``F = F_1 x ... x F_N``.

    Joint points are enumerated lexicographically with the first factor
    varying slowest; ``table[q, i]`` is the ``i``-th component of joint point ``q``.
    """

    factor_sizes: tuple
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.factor_sizes)
        if not sizes or any(k < 1 for k in sizes):
            raise ConfigError("factor sizes must be positive integers")
        joint = int(np.prod(sizes))
        if joint > MAX_JOINT_SIZE:
            raise ConfigError(f"joint space has {joint} points, above the cap of {MAX_JOINT_SIZE}")
        object.__setattr__(self, "factor_sizes", sizes)
        object.__setattr__(self, "table", lex_index(sizes))

    @property
    def joint_size(self) -> int:
        return len(self.table)

    @property
    def n_factors(self) -> int:
        return len(self.factor_sizes)

    def matrix(self, i: int) -> np.ndarray:
        """0/1 matrix ``A_i`` with ``(A_i)_{j q} = 1`` iff the ``i``-th component of ``q`` is ``j``."""
        self._check(i)
        A = np.zeros((self.factor_sizes[i], self.joint_size))
        A[self.table[:, i], np.arange(self.joint_size)] = 1.0
        return A

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n_factors:
            raise IndexError(f"factor index {i} out of range for {self.n_factors} factors")


def project_state(projections: ProjectionMap, i: int, x) -> np.ndarray:
    """Marginal of a joint probability vector on factor ``i``."""
    return np.asarray(x, dtype=float) @ projections.matrix(i).T


def project_momentum(projections: ProjectionMap, i: int, p) -> np.ndarray:
    """Aggregate a joint momentum onto factor ``i`` by summing over each fibre."""
    return np.asarray(p, dtype=float) @ projections.matrix(i).T


def product_measure_chart(projections: ProjectionMap, charts: Sequence[Chart]) -> Chart:
    """Chart of product measures, with momenta lifted as ``p = sum_i A_i^T P_i``."""
    mats = [projections.matrix(i) for i in range(projections.n_factors)]
    table = projections.table

    def split(z, dims):
        out, start = [], 0
        for k in dims:
            out.append(z[..., start:start + k])
            start += k
        return out

    def to_state(z):
        z = np.asarray(z, dtype=float)
        parts = split(z, [c.state_dim for c in charts])
        out = np.ones(z.shape[:-1] + (projections.joint_size,))
        for i, (c, part) in enumerate(zip(charts, parts)):
            out = out * c.to_state(part)[..., table[:, i]]
        return out

    def to_momentum(z):
        z = np.asarray(z, dtype=float)
        parts = split(z, [c.momentum_dim for c in charts])
        return sum(c.to_momentum(part) @ A for c, part, A in zip(charts, parts, mats))

    return Chart(sum(c.state_dim for c in charts), sum(c.momentum_dim for c in charts),
                 to_state, to_momentum)


def empirical_product(systems: Sequence[HamiltonianSystem], projections: ProjectionMap,
                      time_scales: Sequence[float] | None = None) -> HamiltonianSystem:
    """System on the simplex over ``F`` built from simplex systems on the factors ``F_i``.

    ``H(x, p) = sum_i w_i H_i(A_i x, B_i p)`` and ``S(x) = sum_i S_i(A_i x)``,
    where ``A_i`` is the marginal map and ``B_i = (|F_i| / |F|) A_i`` averages a
    joint momentum over each fibre.  On momenta ``p = sum_k A_k^T P_k`` the
    average returns ``P_i`` up to a constant shift, which simplex Hamiltonians
    ignore; the fibre sum would instead rescale ``P_i`` by ``|F| / |F_i|``.
    """
    systems = tuple(systems)
    if len(systems) != projections.n_factors:
        raise ConfigError(f"{len(systems)} factor systems for {projections.n_factors} projections")
    for s, k in zip(systems, projections.factor_sizes):
        if not isinstance(s.domain, SimplexDomain) or s.domain.size != k:
            raise ConfigError(f"factor {s.label} must live on the simplex with {k} points")
    w = np.ones(len(systems)) if time_scales is None else np.asarray(time_scales, dtype=float)
    if w.shape != (len(systems),) or np.any(w <= 0):
        raise ConfigError("time scales must be one positive weight per factor")
    n = projections.joint_size
    A = [projections.matrix(i) for i in range(len(systems))]
    B = [(k / n) * a for k, a in zip(projections.factor_sizes, A)]

    def H(x, p):
        x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
        return sum(wi * s.H(x @ a.T, p @ b.T) for wi, s, a, b in zip(w, systems, A, B))

    def H_p(x, p):
        x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
        return sum(wi * s.H_p(x @ a.T, p @ b.T) @ b for wi, s, a, b in zip(w, systems, A, B))

    def H_x(x, p):
        x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
        return sum(wi * s.H_x(x @ a.T, p @ b.T) @ a for wi, s, a, b in zip(w, systems, A, B))

    def H_pp(x, p):
        x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
        return sum(wi * (b.T @ s.H_pp(x @ a.T, p @ b.T) @ b) for wi, s, a, b in zip(w, systems, A, B))

    def H_px(x, p):
        x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
        return sum(wi * (b.T @ s.H_px(x @ a.T, p @ b.T) @ a) for wi, s, a, b in zip(w, systems, A, B))

    S = DS = D2S = None
    if all(s.has_entropy for s in systems):
        def S(x):
            x = np.asarray(x, dtype=float)
            return sum(s.S(x @ a.T) for s, a in zip(systems, A))

        def DS(x):
            x = np.asarray(x, dtype=float)
            return sum(s.DS(x @ a.T) @ a for s, a in zip(systems, A))

        def D2S(x):
            x = np.asarray(x, dtype=float)
            return sum(a.T @ s.D2S(x @ a.T) @ a for s, a in zip(systems, A))

    chart = product_measure_chart(projections, [s.coords for s in systems])
    return HamiltonianSystem(
        domain=SimplexDomain(n), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px, S=S, DS=DS, D2S=D2S,
        label="empirical_product(" + ", ".join(s.label for s in systems) + ")",
        reversible=all(s.reversible for s in systems),
        strictly_convex=all(s.strictly_convex for s in systems), chart=chart,
        default_grid=_grid_product([s.default_grid for s in systems]),
        extras={"factors": systems, "projections": projections, "time_scales": w})
