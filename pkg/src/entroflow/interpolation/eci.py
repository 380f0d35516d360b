"""The entropy-convexity inequality: pointwise residuals and grid estimates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._parallel import map_pairs
from ..analysis import InequalityReport
from ..core.domain import GridSpec
from ..core.system import HamiltonianSystem, adjoint
from ..errors import EmptyScanError


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _mv(m, v):
    return np.einsum("...ij,...j->...i", m, v)


def single_terms(system: HamiltonianSystem, x, p):
    """``(bracket, rhs)`` of the one-Hamiltonian form at ``(x, p)``.

    ``bracket = <p, H_p> - H`` and
    ``rhs = <p, H_px H_p> - <p, H_pp H_x> - <H_x, H_p>``.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    hp = system.H_p(x, p)
    hx = system.H_x(x, p)
    bracket = _dot(p, hp) - system.H(x, p)
    rhs = _dot(p, _mv(system.H_px(x, p), hp)) - _dot(p, _mv(system.H_pp(x, p), hx)) - _dot(hx, hp)
    return bracket, rhs


@dataclass(frozen=True)
class ECITerms:
    bracket: np.ndarray
    rhs: np.ndarray
    bracket_star: np.ndarray
    rhs_star: np.ndarray

    @property
    def lhs_general(self):
        return self.bracket + self.bracket_star

    @property
    def rhs_general(self):
        return self.rhs + self.rhs_star


def eci_terms(system: HamiltonianSystem, x, p, star: HamiltonianSystem | None = None) -> ECITerms:
    """Both halves of the two-Hamiltonian form; the second uses the adjoint at ``DS(x) - p``."""
    x = system.require_interior(x)
    p = np.asarray(p, dtype=float)
    star = star if star is not None else adjoint(system)
    b, r = single_terms(system, x, p)
    p_star = system.entropy_gradient(x) - p
    bs, rs = single_terms(star, x, p_star)
    return ECITerms(b, r, bs, rs)


def resolve_form(system: HamiltonianSystem, form: str) -> str:
    if form == "auto":
        return "reversible" if system.reversible else "general"
    if form not in ("reversible", "general"):
        raise ValueError(f"unknown inequality form {form!r}")
    return form


def eci_residual(system: HamiltonianSystem, x, p, kappa: float, form: str = "general") -> np.ndarray:
    """Right side minus left side; nonnegative where the inequality holds at ``(x, p)``."""
    form = resolve_form(system, form)
    if form == "reversible":
        x = system.require_interior(x)
        b, r = single_terms(system, x, p)
        return r - kappa * b
    t = eci_terms(system, x, p)
    return t.rhs_general - kappa * t.lhs_general


def reversible_eci_residual(system: HamiltonianSystem, x, p, kappa: float) -> np.ndarray:
    return eci_residual(system, x, p, kappa, form="reversible")


def eci_estimate(system: HamiltonianSystem, grid: GridSpec | None = None, lhs_floor: float = 1e-8,
                 form: str = "auto", return_points: bool = False):
    """Infimum of ``rhs / bracket`` over grid phase points whose bracket is at least ``lhs_floor``."""
    system.require_entropy("the entropy-convexity scan")
    form = resolve_form(system, form)
    grid = grid if grid is not None else system.default_grid
    xs = grid.states(system.domain, system.coords)
    ps = grid.momenta(system.coords)
    star = adjoint(system) if form == "general" else None

    def evaluate(x, p):
        if form == "reversible":
            b, r = single_terms(system, x, p)
        else:
            t = eci_terms(system, x, p, star)
            b, r = t.lhs_general, t.rhs_general
        keep = np.isfinite(b) & np.isfinite(r) & (b >= lhs_floor)
        ratio = np.where(keep, r / np.where(keep, b, 1.0), np.inf)
        k = int(np.argmin(ratio))
        return float(ratio[k]), k, int((~keep).sum()), ratio if return_points else None

    results, batches = map_pairs(evaluate, xs, ps)
    best, bx, bp = np.inf, None, None
    excluded = 0
    for (val, k, exc, _), (x, p) in zip(results, batches):
        excluded += exc
        if val < best:
            best, bx, bp = val, x[k], p[k]
    n = len(xs) * len(ps)
    if bx is None:
        raise EmptyScanError(f"all {n} grid points have bracket below {lhs_floor}")
    rep = InequalityReport("ECI", best, {"state": bx.tolist(), "momentum": bp.tolist()}, n, excluded,
                           float(lhs_floor), {"form": form})
    if return_points:
        return rep, np.concatenate([r[3] for r in results]) if results else np.zeros(0)
    return rep
