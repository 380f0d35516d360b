"""Potentials ``V`` for the diffusion models: quadratic forms and separable polynomials."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import ConfigError


@dataclass(frozen=True)
class Potential:
    """Either ``V(x) = (x-c)^T A (x-c) / 2`` or ``V(x) = sum_i V_i(x_i)`` with polynomial ``V_i``."""

    matrix: np.ndarray | None = None
    center: np.ndarray | None = None
    coefficients: tuple | None = None

    @property
    def dimension(self) -> int:
        if self.matrix is not None:
            return self.matrix.shape[0]
        return len(self.coefficients)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.matrix is not None:
            y = x - self.center
            return 0.5 * np.einsum("...i,ij,...j->...", y, self.matrix, y)
        return sum(P.polyval(x[..., i], c) for i, c in enumerate(self.coefficients))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self.matrix is not None:
            return (x - self.center) @ self.matrix.T
        return np.stack([P.polyval(x[..., i], P.polyder(c)) for i, c in enumerate(self.coefficients)],
                        axis=-1)

    def hess(self, x):
        x = np.asarray(x, dtype=float)
        d = self.dimension
        if self.matrix is not None:
            return np.broadcast_to(self.matrix, x.shape[:-1] + (d, d)).copy()
        diag = np.stack([P.polyval(x[..., i], P.polyder(c, 2)) for i, c in enumerate(self.coefficients)],
                        axis=-1)
        out = np.zeros(x.shape[:-1] + (d, d))
        idx = np.arange(d)
        out[..., idx, idx] = diag
        return out

    def min_curvature(self) -> float:
        """Smallest eigenvalue of the Hessian over all of space (the infimum for polynomials)."""
        if self.matrix is not None:
            return float(np.linalg.eigvalsh(self.matrix)[0])
        return float(min(_poly_inf(P.polyder(c, 2)) for c in self.coefficients))

    def to_json(self) -> dict:
        if self.matrix is not None:
            return {"quadratic": self.matrix.tolist(), "center": self.center.tolist()}
        return {"polynomial": [list(map(float, c)) for c in self.coefficients]}


def _real_critical_points(c) -> np.ndarray:
    dc = P.polyder(c)
    if len(np.trim_zeros(np.asarray(dc, dtype=float), "b")) <= 1:
        return np.array([0.0])
    roots = P.polyroots(dc)
    return np.real(roots[np.abs(roots.imag) < 1e-9])


def _poly_inf(c) -> float:
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    if len(c) == 0:
        return 0.0
    deg = len(c) - 1
    if deg >= 1 and (deg % 2 == 1 or c[-1] < 0):
        return -np.inf
    pts = _real_critical_points(c)
    return float(np.min(P.polyval(pts, c)))


def parse_potential(spec, dimension: int | None = None) -> Potential:
    """Build a convex, nonnegative potential from its JSON description."""
    if isinstance(spec, Potential):
        pot = spec
    elif not isinstance(spec, dict):
        raise ConfigError(f"potential must be an object, got {spec!r}")
    elif "quadratic" in spec:
        A = np.atleast_2d(np.asarray(spec["quadratic"], dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ConfigError("quadratic potential matrix must be square")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ConfigError("quadratic potential matrix must be symmetric")
        c = np.asarray(spec.get("center", np.zeros(A.shape[0])), dtype=float).reshape(A.shape[0])
        pot = Potential(matrix=A, center=c)
    elif "polynomial" in spec:
        coeffs = spec["polynomial"]
        if coeffs and not isinstance(coeffs[0], (list, tuple)):
            coeffs = [coeffs]
        pot = Potential(coefficients=tuple(np.asarray(c, dtype=float) for c in coeffs))
    else:
        raise ConfigError("potential needs a 'quadratic' or 'polynomial' entry")
    if dimension is not None and pot.dimension != dimension:
        raise ConfigError(f"potential has dimension {pot.dimension}, expected {dimension}")
    if pot.min_curvature() < -1e-12:
        raise ConfigError("potential is not convex")
    if pot.coefficients is not None and min(_poly_inf(c) for c in pot.coefficients) < -1e-12:
        raise ConfigError("potential takes negative values")
    return pot


def parse_separable_potential(spec, dimension: int | None = None) -> Potential:
    """Potential whose Hessian is diagonal; convexity is not required."""
    if isinstance(spec, dict) and "quadratic" in spec:
        A = np.atleast_2d(np.asarray(spec["quadratic"], dtype=float))
        if not np.allclose(A, np.diag(np.diag(A))):
            raise ConfigError("potential must be separable (diagonal quadratic form)")
        c = np.asarray(spec.get("center", np.zeros(A.shape[0])), dtype=float).reshape(A.shape[0])
        pot = Potential(matrix=A, center=c)
    elif isinstance(spec, dict) and "polynomial" in spec:
        coeffs = spec["polynomial"]
        if coeffs and not isinstance(coeffs[0], (list, tuple)):
            coeffs = [coeffs]
        pot = Potential(coefficients=tuple(np.asarray(c, dtype=float) for c in coeffs))
    elif isinstance(spec, Potential):
        pot = spec
    else:
        raise ConfigError("potential needs a 'quadratic' or 'polynomial' entry")
    if dimension is not None and pot.dimension != dimension:
        raise ConfigError(f"potential has dimension {pot.dimension}, expected {dimension}")
    return pot
