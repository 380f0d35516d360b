"""Linear changes of variables for systems: ``H'(x, p) = H(C x, D p)``."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..core.system import HamiltonianSystem


def pullback(system: HamiltonianSystem, C, D, domain, chart=None, label=None,
             offset=None) -> HamiltonianSystem:
    """Compose a system with linear maps on states (``C``) and momenta (``D``).

    ``offset`` is added to the mapped state, so states map as ``C x + offset``.
    Entropies are composed the same way: ``S'(x) = S(C x + offset)``.
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    D = np.atleast_2d(np.asarray(D, dtype=float))
    off = np.zeros(C.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    base = system

    def sx(x):
        return np.asarray(x, dtype=float) @ C.T + off

    def sp(p):
        return np.asarray(p, dtype=float) @ D.T

    def H(x, p):
        return base.H(sx(x), sp(p))

    def H_p(x, p):
        return base.H_p(sx(x), sp(p)) @ D

    def H_x(x, p):
        return base.H_x(sx(x), sp(p)) @ C

    def H_pp(x, p):
        return D.T @ base.H_pp(sx(x), sp(p)) @ D

    def H_px(x, p):
        return D.T @ base.H_px(sx(x), sp(p)) @ C

    S = DS = D2S = None
    if system.has_entropy:
        def S(x):
            return base.S(sx(x))

        def DS(x):
            return base.DS(sx(x)) @ C

        def D2S(x):
            return C.T @ base.D2S(sx(x)) @ C

    return replace(system, domain=domain, H=H, H_p=H_p, H_x=H_x, H_pp=H_pp, H_px=H_px,
                   S=S, DS=DS, D2S=D2S, chart=chart, default_grid=None,
                   label=label or f"pullback({system.label})",
                   extras={**system.extras, "base": system, "C": C, "D": D})
