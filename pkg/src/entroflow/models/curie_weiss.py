"""Mean-field Glauber dynamics for the Curie-Weiss model in magnetization coordinates."""
from __future__ import annotations

from dataclasses import replace

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import xlogy

from ..core.domain import Axis, BoxDomain, Chart, GridSpec, SimplexDomain
from ..core.system import HamiltonianSystem
from ._linear import pullback


def G1(x, beta):
    return np.cosh(beta * x) - x * np.sinh(beta * x)


def G2(x, beta):
    return np.sinh(beta * x) - x * np.cosh(beta * x)


def dG1(x, beta):
    return (beta - 1.0) * np.sinh(beta * x) - beta * x * np.cosh(beta * x)


def dG2(x, beta):
    return (beta - 1.0) * np.cosh(beta * x) - beta * x * np.sinh(beta * x)


def _raw_entropy(x, beta):
    x = np.asarray(x, dtype=float)
    return 0.5 * xlogy(1.0 - x, 1.0 - x) + 0.5 * xlogy(1.0 + x, 1.0 + x) - 0.5 * beta * x * x


def normalizing_constant(beta: float) -> float:
    """Constant making the infimum of the entropy zero."""
    if beta <= 1.0:
        return 0.0
    res = minimize_scalar(lambda m: float(_raw_entropy(m, beta)), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-12})
    return -float(res.fun)


def curie_weiss(beta: float) -> HamiltonianSystem:
    if beta < 0:
        raise ValueError("inverse temperature must be nonnegative")
    beta = float(beta)
    c_beta = normalizing_constant(beta)

    def parts(x, p):
        m = np.asarray(x, dtype=float)[..., 0]
        q = 2.0 * np.asarray(p, dtype=float)[..., 0]
        return m, np.cosh(q), np.sinh(q)

    def H(x, p):
        m, c, s = parts(x, p)
        return (c - 1.0) * G1(m, beta) + s * G2(m, beta)

    def H_p(x, p):
        m, c, s = parts(x, p)
        return (2.0 * s * G1(m, beta) + 2.0 * c * G2(m, beta))[..., None]

    def H_x(x, p):
        m, c, s = parts(x, p)
        return ((c - 1.0) * dG1(m, beta) + s * dG2(m, beta))[..., None]

    def H_pp(x, p):
        m, c, s = parts(x, p)
        return (4.0 * c * G1(m, beta) + 4.0 * s * G2(m, beta))[..., None, None]

    def H_px(x, p):
        m, c, s = parts(x, p)
        return (2.0 * s * dG1(m, beta) + 2.0 * c * dG2(m, beta))[..., None, None]

    def S(x):
        return _raw_entropy(np.asarray(x, dtype=float)[..., 0], beta) + c_beta

    def DS(x):
        m = np.asarray(x, dtype=float)[..., 0]
        return (np.arctanh(m) - beta * m)[..., None]

    def D2S(x):
        m = np.asarray(x, dtype=float)[..., 0]
        return (1.0 / (1.0 - m * m) - beta)[..., None, None]

    grid = GridSpec((Axis(-0.9, 0.9, 21),), (Axis(-1.0, 1.0, 21),))
    return HamiltonianSystem(
        domain=BoxDomain((-1.0,), (1.0,)), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
        S=S, DS=DS, D2S=D2S, label=f"curie_weiss(beta={beta:g})", reversible=True,
        default_grid=grid,
        extras={"beta": beta, "C_beta": c_beta, "G1": lambda x: G1(x, beta), "G2": lambda x: G2(x, beta),
                "kappa": 4.0 * (1.0 - beta) if beta <= 1.0 else None})


# states ordered (-1, +1); magnetization m = mu_+ - mu_-, momentum q = (p_+ - p_-)/2
TWO_STATE_C = np.array([[-1.0, 1.0]])
TWO_STATE_D = np.array([[-0.5, 0.5]])


def two_state_chart() -> Chart:
    def to_state(z):
        m = np.asarray(z, dtype=float)[..., 0]
        return np.stack([0.5 * (1.0 - m), 0.5 * (1.0 + m)], axis=-1)

    def to_momentum(z):
        q = np.asarray(z, dtype=float)[..., 0]
        return np.stack([-q, q], axis=-1)

    return Chart(1, 1, to_state, to_momentum)


def curie_weiss_two_state(beta: float) -> HamiltonianSystem:
    """The same dynamics written for a probability vector on the two spin values."""
    base = curie_weiss(beta)
    sys = pullback(base, TWO_STATE_C, TWO_STATE_D, SimplexDomain(2), chart=two_state_chart(),
                   label=f"curie_weiss_two_state(beta={float(beta):g})")
    return replace(sys, default_grid=GridSpec((Axis(-0.9, 0.9, 21),), (Axis(-1.0, 1.0, 21),)))
