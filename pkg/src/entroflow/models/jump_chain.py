"""Mean-field limit of independent copies of a finite Markov jump process."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from ..core.domain import Axis, GridSpec, SimplexDomain
from ..core.pointwise import information
from ..core.system import HamiltonianSystem
from ..errors import ConfigError, PreconditionError

BALANCE_TOL = 1e-10


def _prepare(rates, pi):
    r = np.array(rates, dtype=float)
    pi = np.asarray(pi, dtype=float).ravel()
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] != pi.size:
        raise ConfigError("rates must be a square matrix matching the length of pi")
    np.fill_diagonal(r, 0.0)
    if np.any(r < 0):
        raise ConfigError("jump rates must be nonnegative")
    if np.any(pi <= 0) or abs(pi.sum() - 1.0) > 1e-12:
        raise ConfigError("pi must be a positive probability vector")
    return r, pi


def detailed_balance_defect(rates, pi) -> float:
    r, pi = _prepare(rates, pi)
    flux = pi[:, None] * r
    return float(np.max(np.abs(flux - flux.T)))


def jump_chain(rates, pi) -> HamiltonianSystem:
    """``H(x, p) = sum_ab x_a r_ab (exp(p_b - p_a) - 1)`` with relative entropy to ``pi``."""
    r, pi = _prepare(rates, pi)
    n = pi.size
    balance = pi @ r - pi * r.sum(axis=1)
    if np.max(np.abs(balance)) > BALANCE_TOL:
        raise ConfigError("pi is not stationary for the given rates")

    def E(p):
        p = np.asarray(p, dtype=float)
        return r * np.exp(p[..., None, :] - p[..., :, None])

    def H(x, p):
        return np.einsum("...a,...ab->...", np.asarray(x, dtype=float), E(p) - r)

    def H_p(x, p):
        x = np.asarray(x, dtype=float)
        e = E(p)
        return np.einsum("...a,...ac->...c", x, e) - x * e.sum(axis=-1)

    def H_x(x, p):
        e = E(p)
        shape = np.broadcast_shapes(np.shape(x), np.shape(p))
        return np.broadcast_to((e - r).sum(axis=-1), shape).copy()

    def H_pp(x, p):
        x = np.asarray(x, dtype=float)
        e = E(p)
        inflow = np.einsum("...a,...ac->...c", x, e)
        outflow = x * e.sum(axis=-1)
        out = -(x[..., :, None] * e + np.swapaxes(x[..., :, None] * e, -1, -2))
        idx = np.arange(n)
        out[..., idx, idx] += inflow + outflow
        return out

    def H_px(x, p):
        e = E(p)
        shape = np.broadcast_shapes(np.shape(x), np.shape(p))
        out = np.swapaxes(e, -1, -2).copy()
        idx = np.arange(n)
        out[..., idx, idx] -= e.sum(axis=-1)
        return np.broadcast_to(out, shape[:-1] + (n, n)).copy()

    def S(x):
        x = np.asarray(x, dtype=float)
        return np.sum(xlogy(x, x) - x * np.log(pi), axis=-1)

    def DS(x):
        return np.log(np.asarray(x, dtype=float) / pi) + 1.0

    def D2S(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (n,))
        idx = np.arange(n)
        out[..., idx, idx] = 1.0 / x
        return out

    k = 11 if n <= 3 else 5
    grid = GridSpec(tuple(Axis(0.02, 0.9, k) for _ in range(n - 1)),
                    tuple(Axis(-1.0, 1.0, 7 if n <= 3 else 3) for _ in range(n - 1)), margin=0.01)
    reversible = detailed_balance_defect(r, pi) <= BALANCE_TOL
    return HamiltonianSystem(
        domain=SimplexDomain(n), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px, S=S, DS=DS, D2S=D2S,
        label=f"jump_chain(n={n})", reversible=reversible, default_grid=grid,
        extras={"rates": r, "pi": pi})


@dataclass(frozen=True)
class MLSIComparison:
    ent: float
    dirichlet: float
    S: float
    I: float

    def __iter__(self):
        return iter((self.ent, self.dirichlet, self.S, self.I))


def relative_entropy_functional(f, pi) -> float:
    f = np.asarray(f, dtype=float)
    return float(np.sum(pi * f * np.log(f)))


def dirichlet_form(f, g, rates, pi) -> float:
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    df = f[None, :] - f[:, None]
    dg = g[None, :] - g[:, None]
    return float(0.5 * np.sum(pi[:, None] * rates * df * dg))


def mlsi_compare(chain: HamiltonianSystem, f, tol: float = 1e-12) -> MLSIComparison:
    """Evaluate ``Ent(f)``, ``E(f, log f)``, ``S(x)`` and ``I(x)`` at ``x = f pi``.

    Raises when the two identities ``S = Ent`` and ``I = E(f, log f)`` fail
    beyond ``tol`` (relative to the magnitude of the values).
    """
    r, pi = chain.extras["rates"], chain.extras["pi"]
    if detailed_balance_defect(r, pi) > BALANCE_TOL:
        raise PreconditionError("the comparison needs rates reversible with respect to pi")
    f = np.asarray(f, dtype=float).ravel()
    if np.any(f <= 0):
        raise PreconditionError("density must be positive")
    if abs(float(np.sum(f * pi)) - 1.0) > 1e-12:
        raise PreconditionError("density must integrate to one against pi")
    x = f * pi
    ent = relative_entropy_functional(f, pi)
    dirichlet = dirichlet_form(f, np.log(f), r, pi)
    s = float(chain.S(x))
    i = float(information(chain, x))
    scale = 1.0 + max(abs(ent), abs(dirichlet))
    if abs(s - ent) > tol * scale or abs(i - dirichlet) > tol * scale:
        raise PreconditionError(
            f"entropy/information identities fail: S-Ent={s - ent:.3e}, I-E={i - dirichlet:.3e}")
    return MLSIComparison(ent, dirichlet, s, i)
