"""One-dimensional non-reversible fixture ``H(x,p) = p^2/2 - (x+1) p + e^p - 1``."""
from __future__ import annotations

import numpy as np

from ..core.domain import Axis, BoxDomain, GridSpec
from ..core.system import HamiltonianSystem

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(40)


def _H(x, p):
    return 0.5 * p * p - (x + 1.0) * p + np.exp(p) - 1.0


def stationary_momentum(x, tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
    """Nonzero root in ``p`` of ``H(x, p) = 0`` (zero at ``x = 0``).

    ``p -> H(x, p)`` is convex and vanishes at 0; starting Newton at ``2x``
    puts the iterate on the outer side of the second root, where Newton
    is monotone.
    """
    x = np.asarray(x, dtype=float)
    p = 2.0 * x
    for _ in range(max_iter):
        f = _H(x, p)
        fp = p - (x + 1.0) + np.exp(p)
        step = np.where(x == 0.0, 0.0, f / np.where(fp == 0.0, 1.0, fp))
        p = p - step
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(p))):
            break
    return np.where(x == 0.0, 0.0, p)


def fitted_entropy():
    """``(S, DS, D2S)`` solving ``H(x, DS(x)) = 0`` with ``S(0) = 0``."""

    def DS(x):
        return stationary_momentum(np.asarray(x, dtype=float)[..., 0])[..., None]

    def D2S(x):
        y = np.asarray(x, dtype=float)[..., 0]
        q = stationary_momentum(y)
        hp = q - (y + 1.0) + np.exp(q)
        safe = np.abs(y) > 1e-6
        ratio = np.where(safe, q / np.where(safe, hp, 1.0), 1.0 - y / 3.0)
        return ratio[..., None, None]

    def S(x):
        y = np.asarray(x, dtype=float)[..., 0]
        nodes = 0.5 * y[..., None] * (1.0 + _NODES)
        return 0.5 * y * np.sum(_WEIGHTS * stationary_momentum(nodes), axis=-1)

    return S, DS, D2S


def levy_remark(entropy=None) -> HamiltonianSystem:
    """Build the fixture; ``entropy`` is ``None``, ``"fitted"`` or a ``(S, DS, D2S)`` triple."""

    def H(x, p):
        return _H(np.asarray(x, dtype=float)[..., 0], np.asarray(p, dtype=float)[..., 0])

    def H_p(x, p):
        y, q = np.asarray(x, dtype=float)[..., 0], np.asarray(p, dtype=float)[..., 0]
        return (q - (y + 1.0) + np.exp(q))[..., None]

    def H_x(x, p):
        q = np.asarray(p, dtype=float)[..., 0] + 0.0 * np.asarray(x, dtype=float)[..., 0]
        return (-q)[..., None]

    def H_pp(x, p):
        q = np.asarray(p, dtype=float)[..., 0] + 0.0 * np.asarray(x, dtype=float)[..., 0]
        return (1.0 + np.exp(q))[..., None, None]

    def H_px(x, p):
        q = np.asarray(p, dtype=float)[..., 0] + 0.0 * np.asarray(x, dtype=float)[..., 0]
        return (-np.ones_like(q))[..., None, None]

    if entropy is None:
        S = DS = D2S = None
    elif isinstance(entropy, str) and entropy == "fitted":
        S, DS, D2S = fitted_entropy()
    else:
        S, DS, D2S = entropy
    grid = GridSpec((Axis(-1.0, 1.0, 21),), (Axis(-1.0, 1.0, 21),))
    return HamiltonianSystem(
        domain=BoxDomain.unbounded(1), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
        S=S, DS=DS, D2S=D2S, label="levy_remark", reversible=False, default_grid=grid)
