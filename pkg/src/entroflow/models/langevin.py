"""Underdamped Langevin dynamics in position-momentum phase space.

The state is ``(x, rho)`` with ``x, rho`` in ``R^d``; the conjugate variables
are ``(p_x, p_rho)``.  The Hamiltonian is affine in ``p_x``, so the system is
convex but not strictly convex in the momentum.
"""
from __future__ import annotations

import numpy as np

from ..core.domain import Axis, BoxDomain, GridSpec
from ..core.system import HamiltonianSystem
from ..errors import ConfigError
from .potential import Potential, parse_separable_potential


def langevin(gamma: float = 1.0, theta: float = 1.0, m: float = 1.0, V_spec=None) -> HamiltonianSystem:
    for name, val in (("gamma", gamma), ("theta", theta), ("m", m)):
        if not val > 0:
            raise ConfigError(f"{name} must be positive, got {val}")
    V: Potential = parse_separable_potential(V_spec if V_spec is not None else {"quadratic": [[1.0]]})
    d = V.dimension
    g, th, mm = float(gamma), float(theta), float(m)

    def split(z):
        z = np.asarray(z, dtype=float)
        return z[..., :d], z[..., d:]

    def H(z, p):
        x, rho = split(z)
        px, pr = split(p)
        return (np.sum(rho / mm * px, axis=-1) - np.sum(V.grad(x) * pr, axis=-1)
                - np.sum(g * rho / mm * pr, axis=-1) + g * th * np.sum(pr * pr, axis=-1))

    def H_p(z, p):
        x, rho = split(z)
        _, pr = split(p)
        shape = np.broadcast_shapes(rho.shape, pr.shape)
        return np.concatenate([np.broadcast_to(rho / mm, shape),
                               -V.grad(x) - g * rho / mm + 2.0 * g * th * pr], axis=-1)

    def H_x(z, p):
        x, rho = split(z)
        px, pr = split(p)
        dx = -np.einsum("...ij,...i->...j", V.hess(x), pr)
        drho = px / mm - g * pr / mm
        shape = np.broadcast_shapes(dx.shape, drho.shape)
        return np.concatenate([np.broadcast_to(dx, shape), np.broadcast_to(drho, shape)], axis=-1)

    def H_pp(z, p):
        shape = np.broadcast_shapes(np.shape(z), np.shape(p))[:-1]
        out = np.zeros(shape + (2 * d, 2 * d))
        idx = np.arange(d, 2 * d)
        out[..., idx, idx] = 2.0 * g * th
        return out

    def H_px(z, p):
        x, _ = split(z)
        shape = np.broadcast_shapes(np.shape(z), np.shape(p))[:-1]
        out = np.zeros(shape + (2 * d, 2 * d))
        eye = np.eye(d)
        out[..., :d, d:] = eye / mm
        out[..., d:, :d] = -V.hess(x)
        out[..., d:, d:] = -g / mm * eye
        return out

    def S(z):
        x, rho = split(z)
        return V.value(x) / th + np.sum(rho * rho, axis=-1) / (2.0 * th * mm)

    def DS(z):
        x, rho = split(z)
        return np.concatenate([V.grad(x) / th, rho / (th * mm)], axis=-1)

    def D2S(z):
        x, _ = split(z)
        out = np.zeros(np.shape(z)[:-1] + (2 * d, 2 * d))
        out[..., :d, :d] = V.hess(x) / th
        idx = np.arange(d, 2 * d)
        out[..., idx, idx] = 1.0 / (th * mm)
        return out

    n = 21 if d == 1 else 5
    grid = GridSpec(tuple(Axis(-2.0, 2.0, n) for _ in range(2 * d)),
                    tuple(Axis(-1.0, 1.0, 7 if d == 1 else 3) for _ in range(2 * d)))
    return HamiltonianSystem(
        domain=BoxDomain.unbounded(2 * d), H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
        S=S, DS=DS, D2S=D2S, label=f"langevin(gamma={g:g}, theta={th:g}, m={mm:g})",
        reversible=False, strictly_convex=False, default_grid=grid,
        extras={"gamma": g, "theta": th, "m": mm, "potential": V, "half": d,
                "kappa_sup": 2.0 * g / mm})


def in_omega(z, half: int) -> np.ndarray:
    """Sign-aligned region: every coordinate has ``x_i rho_i >= 0``."""
    z = np.asarray(z, dtype=float)
    return np.all(z[..., :half] * z[..., half:] >= 0.0, axis=-1)


def in_omega_beta(z, half: int, beta: float) -> np.ndarray:
    """Region ``rho_i (beta rho_i + x_i) >= 0`` for every coordinate."""
    z = np.asarray(z, dtype=float)
    x, rho = z[..., :half], z[..., half:]
    return np.all(rho * (beta * rho + x) >= 0.0, axis=-1)


def second_order_closed_form(system: HamiltonianSystem, z, kappa: float) -> np.ndarray:
    """Closed-form second-order residual for separable potentials.

    Equals ``(2 gamma/m - kappa) c |rho|^2 + 2 c <rho, grad V(x)>`` with
    ``c = gamma / (theta m^2)``.
    """
    e = system.extras
    d = e["half"]
    z = np.asarray(z, dtype=float)
    x, rho = z[..., :d], z[..., d:]
    c = e["gamma"] / (e["theta"] * e["m"] ** 2)
    return np.sum((2.0 * e["gamma"] / e["m"] - kappa) * c * rho * rho
                  + 2.0 * c * rho * e["potential"].grad(x), axis=-1)
