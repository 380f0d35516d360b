"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` to see the lines inline.
"""
import math
import time

import numpy as np
import pytest

from entroflow.analysis import decay_check, eii_estimate, integrate_mckean_vlasov
from entroflow.core import (reversibility_defect, stationarity_residual, tilted_decomposition_residual,
                            verify_derivatives)
from entroflow.core.domain import Axis, GridSpec
from entroflow.interpolation import (convexity_report, eci_estimate, entropy_derivative_identity_residual,
                                     interior_assumption_check, interpolation_cost, reversed_cost_rate, shoot,
                                     time_reversal_check)
from entroflow.models import (curie_weiss, hypercube, jump_chain, langevin, levy_remark, ornstein_uhlenbeck,
                              wright_fisher, wright_fisher_1d)
from entroflow.models.jump_chain import mlsi_compare
from entroflow.tensor import product

DT = 1e-3


@pytest.fixture
def verdict(capsys):
    def emit(label, passed, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}")
        assert passed, detail
    return emit


def trapezoid(y, t):
    return float(np.sum(0.5 * np.diff(t) * (y[1:] + y[:-1])))


_PATHS = {}


def interpolation(name):
    """Shared interpolations, computed once per session."""
    if name not in _PATHS:
        system, a, b = {
            "cw": (curie_weiss(0.5), [-0.5], [0.5]),
            "wf": (wright_fisher_1d([1.0, 1.0]), [0.3], [0.7]),
            "ou": (ornstein_uhlenbeck(), [0.0], [1.0]),
        }[name]
        _PATHS[name] = (system, shoot(system, a, b, 1.0, DT))
    return _PATHS[name]


def test_criterion_01_curie_weiss_eci(verdict):
    grid = GridSpec((Axis(-0.99, 0.99, 201),), (Axis(-2.0, 2.0, 201),))
    rows, ok = [], True
    for beta in (0.0, 0.25, 0.5, 0.75, 1.0):
        t0 = time.perf_counter()
        est = eci_estimate(curie_weiss(beta), grid, lhs_floor=1e-8).kappa_estimate
        dt = time.perf_counter() - t0
        good = abs(est - 4 * (1 - beta)) <= 0.05 and dt <= 10
        ok &= good
        row = f"beta={beta:g} est={est:.4f} target={4 * (1 - beta):g} {dt:.2f}s"
        if not good:
            # informational only: the two-Hamiltonian form on the same grid
            gen = eci_estimate(curie_weiss(beta), grid, lhs_floor=1e-8, form="general").kappa_estimate
            row += f" x (general form {gen:.4f})"
        rows.append(row)
    verdict("1", ok, "; ".join(rows))


def test_criterion_02_wright_fisher_eci(verdict):
    rows, ok = [], True
    for mu in ((1.0, 1.0), (2.0, 1.0), (4.0, 1.0)):
        target = 0.5 * sum(mu) + math.sqrt(mu[0] * mu[1])
        t0 = time.perf_counter()
        est = eci_estimate(wright_fisher(list(mu), reduced=True)).kappa_estimate
        dt = time.perf_counter() - t0
        ok &= abs(est - target) <= 0.05 and dt <= 10
        rows.append(f"mu={mu} est={est:.4f} target={target:.4f}")
    verdict("2", ok, "; ".join(rows))


def test_criterion_03a_langevin_eii(verdict):
    rows, ok = [], True
    for gamma, m in ((1.0, 1.0), (2.0, 1.0), (1.0, 2.0)):
        est = eii_estimate(langevin(gamma, 1.0, m)).kappa_estimate
        ok &= abs(est - 2 * gamma / m) <= 0.05
        rows.append(f"(gamma,m)=({gamma:g},{m:g}) est={est:.4f} target={2 * gamma / m:g}")
    verdict("3a", ok, "; ".join(rows))


def test_criterion_03b_langevin_eci_violation(verdict):
    est = eci_estimate(langevin()).kappa_estimate
    verdict("3b", est <= 0.0, f"estimate {est:.4f} (a violating point exists for kappa=0.1 iff < 0.1)")


def test_criterion_04_hypercube(verdict):
    rows, ok = [], True
    for N in (1, 2, 3):
        for beta in (0.0, 0.5):
            system = hypercube(N, beta)
            fine = GridSpec(tuple(Axis(-0.9, 0.9, 11) for _ in range(N)),
                            tuple(Axis(-0.05, 0.05, 5) for _ in range(N)), margin=1e-9)
            t0 = time.perf_counter()
            wide = eci_estimate(system).kappa_estimate
            near = eci_estimate(system, fine).kappa_estimate
            dt = time.perf_counter() - t0
            est, target = min(wide, near), 4 / N * (1 - beta)
            good = abs(est - target) <= 0.1 and dt <= 60
            ok &= good
            rows.append(f"N={N} beta={beta:g} est={est:.4f} (wide {wide:.4f}) target={target:.4f} {dt:.1f}s")
    verdict("4", ok, "; ".join(rows))


def test_criterion_05_ou_closed_forms(verdict):
    s = ornstein_uhlenbeck()
    eii = eii_estimate(s).kappa_estimate
    _, traj = interpolation("ou")
    p0, cost = traj.momenta[0, 0], interpolation_cost(traj)
    h1 = (math.e ** 2 - 1) / (4 * math.sinh(1) ** 2)
    rev = eci_estimate(s, form="reversible").kappa_estimate
    lam = 1.0
    checks = [abs(eii - 2) <= 1e-3, abs(p0 - 1 / math.sinh(1)) <= 1e-5, abs(cost - h1) <= 1e-4,
              abs(rev - 2 * lam) <= 1e-3, rev >= lam]
    verdict("5", all(checks), f"EII {eii:.6f}; p0 {p0:.6f} (1/sinh1 {1 / math.sinh(1):.6f}); "
                              f"h1 {cost:.6f} (closed form {h1:.6f}); reversible ECI {rev:.6f} "
                              f"(2 lambda_min = 2, lower bound lambda_min = 1 holds: {rev >= lam})")


def test_criterion_06_decay_equivalence(verdict):
    s = curie_weiss(0.5)
    rng = np.random.default_rng(2024)
    starts = rng.uniform(-0.95, 0.95, 10)
    worst2, fails3 = -np.inf, 0
    for x0 in starts:
        traj = integrate_mckean_vlasov(s, [x0], 3.0, DT)
        r2 = decay_check(traj, 2.0)
        worst2 = max(worst2, r2.max_violation / (1.0 + traj.entropy[0]))
        fails3 += not decay_check(traj, 3.0).passed
    ok = worst2 <= 1e-6 and fails3 >= 1
    verdict("6", ok, f"kappa=2 worst relative excess {worst2:.2e}; kappa=3 fails for {fails3}/10 starts")


def test_criterion_07_entropy_derivative_identity(verdict):
    res = {n: entropy_derivative_identity_residual(*interpolation(n)) for n in ("cw", "wf")}
    verdict("7", max(res.values()) < 1e-4, ", ".join(f"{k} {v:.2e}" for k, v in res.items()))


def test_criterion_08_time_reversal(verdict):
    res = {n: time_reversal_check(*interpolation(n)) for n in ("cw", "wf", "ou")}
    ok = all(r.max < 1e-4 for r in res.values())
    verdict("8", ok, ", ".join(f"{k} adjoint {r.adjoint_residual:.2e} symmetrized {r.symmetrized_residual:.2e}"
                                for k, r in res.items()))


def test_criterion_09_convexity_forms(verdict):
    rows, ok = [], True
    for name, kappa in (("cw", 2.0), ("wf", 2.0)):
        system, traj = interpolation(name)
        at_opt = convexity_report(system, traj, kappa)
        at_zero = convexity_report(system, traj, 0.0)
        over = convexity_report(system, traj, 1.5 * kappa)
        good = at_opt.passed and at_zero.passed and not over.form_passed("d")
        ok &= good
        rows.append(f"{name}: kappa={kappa:g} {at_opt.passed}, kappa=0 {at_zero.passed}, "
                    f"form d at {1.5 * kappa:g} fails {not over.form_passed('d')}")
    verdict("9", ok, "; ".join(rows))


def test_criterion_10_decomposition(verdict):
    rng = np.random.default_rng(7)
    models = {"cw0.5": (curie_weiss(0.5), (-0.95, 0.95)), "cw0": (curie_weiss(0.0), (-0.95, 0.95)),
              "wf(2,1)": (wright_fisher_1d([2.0, 1.0]), (0.05, 0.95)), "ou": (ornstein_uhlenbeck(), (-2.0, 2.0))}
    worst = {}
    for name, (s, (lo, hi)) in models.items():
        xs = rng.uniform(lo, hi, 100)
        vs = rng.uniform(-1.0, 1.0, 100)
        worst[name] = max(float(tilted_decomposition_residual(s, np.array([x]), np.array([v])))
                          for x, v in zip(xs, vs))
    gaps = {}
    for name in ("cw", "wf", "ou"):
        system, traj = interpolation(name)
        rev = reversed_cost_rate(system, traj)
        lhs = trapezoid(traj.lagrangian - rev, traj.times)
        rhs = float(system.S(traj.states[-1:]) - system.S(traj.states[:1]))
        gaps[name] = abs(lhs - rhs)
    ok = max(worst.values()) < 1e-8 and max(gaps.values()) < 1e-5
    verdict("10", ok, "pointwise " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
            + "; integrated " + ", ".join(f"{k} {v:.1e}" for k, v in gaps.items()))


def test_criterion_11_mlsi_bridge(verdict):
    rng = np.random.default_rng(11)
    chains = [(jump_chain([[0, 1], [1, 0]], [0.5, 0.5]), np.array([0.5, 0.5])),
              (jump_chain([[0, 1, 1], [2, 0, 1], [2, 1, 0]], [0.5, 0.25, 0.25]), np.array([0.5, 0.25, 0.25]))]
    worst = 0.0
    for chain, pi in chains:
        for _ in range(20):
            f = rng.uniform(0.05, 3.0, len(pi))
            f /= f @ pi
            ent, dirichlet, S, I = mlsi_compare(chain, f, tol=1.0)
            worst = max(worst, abs(S - ent), abs(I - dirichlet))
    verdict("11", worst <= 1e-12, f"worst identity gap {worst:.1e} over 40 densities")


def test_criterion_12_min_rule(verdict):
    s = product([curie_weiss(0.0), curie_weiss(0.5)])
    eii = eii_estimate(s).kappa_estimate
    eci = eci_estimate(s).kappa_estimate
    verdict("12", abs(eii - 2) <= 0.1 and abs(eci - 2) <= 0.1, f"EII {eii:.4f}, ECI {eci:.4f} (target 2)")


def test_criterion_13_interior_assumption(verdict):
    rows, ok = [], True
    for s in (curie_weiss(0.0), curie_weiss(0.5), curie_weiss(1.0),
              wright_fisher_1d([1.0, 1.0]), wright_fisher_1d([2.0, 1.0])):
        rep = interior_assumption_check(s)
        last = min(rep.conditions["d"].detail[side]["last"] for side in ("lower", "upper"))
        ok &= rep.passed and last > 1e3
        rows.append(f"{s.label} {'ok' if rep.passed else 'fails ' + str([k for k, c in rep.conditions.items() if not c.passed])} "
                    f"last ratio {last:.3g}")
    verdict("13", ok, "; ".join(rows))


def test_criterion_14_validation_gate(verdict):
    models = [curie_weiss(0.0), curie_weiss(0.5), curie_weiss(1.0), ornstein_uhlenbeck(),
              ornstein_uhlenbeck({"quadratic": [[1.0, 0.0], [0.0, 4.0]]}), langevin(),
              wright_fisher([1.0, 1.0]), wright_fisher([1.0, 2.0, 1.5]), wright_fisher_1d([2.0, 1.0]),
              hypercube(2, 0.5), jump_chain([[0, 1, 1], [2, 0, 1], [2, 1, 0]], [0.5, 0.25, 0.25]),
              levy_remark("fitted")]
    failures = []
    for s in models:
        if not verify_derivatives(s, rel_tol=1e-5).passed:
            failures.append(f"{s.label} derivatives")
        if s.label == "levy_remark" or not s.has_entropy:
            continue
        xs = s.default_grid.states(s.domain, s.coords)
        if np.max(stationarity_residual(s, xs)) >= 1e-8:
            failures.append(f"{s.label} stationarity")
        if s.label.startswith(("curie", "ornstein", "wright")) and reversibility_defect(s) >= 1e-10:
            failures.append(f"{s.label} reversibility")
    verdict("14", not failures, f"{len(models)} models checked" + (f"; failing: {failures}" if failures else ""))
