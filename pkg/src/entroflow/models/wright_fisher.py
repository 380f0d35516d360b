"""Wright-Fisher diffusion with parent-independent mutation.

The full model lives on the probability simplex.  Its formulas are extended
off the simplex through ``sum(x)`` so that ambient derivatives are exact; on
the simplex the extension agrees with the model.  The reduced model is the
two-type case written in the frequency ``x`` of one type on ``[0, 1]``.
"""
from __future__ import annotations

import numpy as np

from ..core.domain import Axis, BoxDomain, GridSpec, SimplexDomain
from ..core.system import HamiltonianSystem
from ..errors import ConfigError


def _check_mu(mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size < 2:
        raise ConfigError("mutation vector needs at least two entries")
    if not np.all(mu > 0):
        raise ConfigError(f"mutation rates must be positive, got {mu.tolist()}")
    return mu


def wright_fisher(mu, reduced: bool = False) -> HamiltonianSystem:
    mu = _check_mu(mu)
    if reduced:
        if mu.size != 2:
            raise ConfigError("the reduced form needs exactly two mutation rates")
        return wright_fisher_1d(mu)
    n = mu.size
    tot = float(mu.sum())

    def drift(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (mu * x.sum(axis=-1, keepdims=True) - tot * x)

    def H(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        xp = np.sum(x * p, axis=-1)
        return 0.5 * (np.sum(x * p * p, axis=-1) - xp * xp) + np.sum(drift(x) * p, axis=-1)

    def H_p(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        xp = np.sum(x * p, axis=-1, keepdims=True)
        return x * p - x * xp + drift(x)

    def H_x(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        xp = np.sum(x * p, axis=-1, keepdims=True)
        mp = np.sum(mu * p, axis=-1, keepdims=True)
        return 0.5 * p * p - p * xp + 0.5 * (mp - tot * p)

    def H_pp(x, p):
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(x.shape, np.shape(p))
        x = np.broadcast_to(x, shape)
        out = -x[..., :, None] * x[..., None, :]
        idx = np.arange(n)
        out[..., idx, idx] += x
        return out

    def H_px(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        shape = np.broadcast_shapes(x.shape, p.shape)
        x, p = np.broadcast_to(x, shape), np.broadcast_to(p, shape)
        xp = np.sum(x * p, axis=-1)
        out = -x[..., :, None] * p[..., None, :] + 0.5 * mu[:, None]
        idx = np.arange(n)
        out[..., idx, idx] += p - xp[..., None] - 0.5 * tot
        return out

    def S(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.sum(mu * (np.log(mu / tot) - np.log(x)), axis=-1)

    def DS(x):
        return -mu / np.asarray(x, dtype=float)

    def D2S(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (n,))
        idx = np.arange(n)
        out[..., idx, idx] = mu / (x * x)
        return out

    k = 11 if n <= 3 else 5
    grid = GridSpec(tuple(Axis(0.02, 0.9, k) for _ in range(n - 1)),
                    tuple(Axis(-2.0, 2.0, 9 if n <= 3 else 3) for _ in range(n - 1)), margin=0.01)
    return HamiltonianSystem(
        domain=SimplexDomain(n), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px, S=S, DS=DS, D2S=D2S,
        label=f"wright_fisher(mu={mu.tolist()})", reversible=True, default_grid=grid,
        extras={"mu": mu, "eii_kappa": 0.5 * tot})


def wright_fisher_1d(mu) -> HamiltonianSystem:
    """``H = a(x) p^2 / 2 - b(x) p`` with ``a = x(1-x)`` and ``b = (x mu_1 - (1-x) mu_2) / 2``."""
    mu = _check_mu(mu)
    if mu.size != 2:
        raise ConfigError("the one-dimensional form needs exactly two mutation rates")
    m1, m2 = float(mu[0]), float(mu[1])
    tot = m1 + m2

    def a(x):
        return x * (1.0 - x)

    def b(x):
        return 0.5 * (x * m1 - (1.0 - x) * m2)

    def unpack(x, p):
        return np.asarray(x, dtype=float)[..., 0], np.asarray(p, dtype=float)[..., 0]

    def H(x, p):
        y, q = unpack(x, p)
        return 0.5 * a(y) * q * q - b(y) * q

    def H_p(x, p):
        y, q = unpack(x, p)
        return (a(y) * q - b(y))[..., None]

    def H_x(x, p):
        y, q = unpack(x, p)
        return (0.5 * (1.0 - 2.0 * y) * q * q - 0.5 * tot * q)[..., None]

    def H_pp(x, p):
        y, q = unpack(x, p)
        return (a(y) + 0.0 * q)[..., None, None]

    def H_px(x, p):
        y, q = unpack(x, p)
        return ((1.0 - 2.0 * y) * q - 0.5 * tot)[..., None, None]

    def S(x):
        y = np.asarray(x, dtype=float)[..., 0]
        with np.errstate(divide="ignore"):
            return m1 * (np.log(m1 / tot) - np.log(1.0 - y)) + m2 * (np.log(m2 / tot) - np.log(y))

    def DS(x):
        y = np.asarray(x, dtype=float)[..., 0]
        return (m1 / (1.0 - y) - m2 / y)[..., None]

    def D2S(x):
        y = np.asarray(x, dtype=float)[..., 0]
        return (m1 / (1.0 - y) ** 2 + m2 / (y * y))[..., None, None]

    grid = GridSpec((Axis(0.05, 0.95, 19),), (Axis(-2.0, 2.0, 21),))
    return HamiltonianSystem(
        domain=BoxDomain((0.0,), (1.0,)), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
        S=S, DS=DS, D2S=D2S, label=f"wright_fisher_1d(mu=[{m1:g}, {m2:g}])", reversible=True,
        default_grid=grid,
        extras={"mu": mu, "a": a, "b": b, "eci_kappa": 0.5 * tot + np.sqrt(m1 * m2)})
