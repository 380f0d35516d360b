import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entroflow.analysis import integrate_mckean_vlasov
from entroflow.errors import DomainError, ShootingError, UnsupportedOperationError
from entroflow.interpolation import (convexity_report, entropy_derivative_identity_residual, green_kernel,
                                     hamilton_flow, interior_assumption_check, interpolation_cost,
                                     lagrangian_along, reversed_cost_rate, reversed_cost_rate_direct, shoot,
                                     time_reversal_check)
from entroflow.models import curie_weiss, langevin, ornstein_uhlenbeck, wright_fisher, wright_fisher_1d


@pytest.fixture(scope="module")
def cw_path():
    return shoot(curie_weiss(0.5), [-0.5], [0.5], 1.0, 1e-3)


@pytest.fixture(scope="module")
def ou_path():
    return shoot(ornstein_uhlenbeck(), [0.0], [1.0], 1.0, 1e-3)


class TestHamiltonFlow:
    def test_ou_closed_form(self):
        x0, p0 = 0.3, 0.7
        traj = hamilton_flow(ornstein_uhlenbeck(), [x0], [p0], 1.0, 1e-3)
        t = traj.times
        assert np.allclose(traj.momenta[:, 0], p0 * np.exp(t), atol=1e-6)
        assert np.allclose(traj.states[:, 0], x0 * np.exp(-t) + p0 * np.sinh(t), atol=1e-6)

    def test_zero_momentum_is_mckean_vlasov(self):
        s = curie_weiss(0.5)
        a = hamilton_flow(s, [0.7], [0.0], 2.0, 1e-3)
        b = integrate_mckean_vlasov(s, [0.7], 2.0, 1e-3)
        assert np.all(a.momenta == 0.0)
        assert np.allclose(a.states, b.states, atol=1e-12)

    @pytest.mark.parametrize("system,x0,p0", [
        (curie_weiss(0.5), [0.2], [0.3]),
        (wright_fisher_1d([2.0, 1.0]), [0.4], [0.5]),
        (ornstein_uhlenbeck({"quadratic": [[1.0, 0.0], [0.0, 4.0]]}), [0.5, -0.2], [0.1, 0.3]),
        (wright_fisher([1.0, 1.0, 1.0]), [0.3, 0.3, 0.4], [0.5, -0.5, 0.0]),
    ])
    def test_energy_conservation(self, system, x0, p0):
        traj = hamilton_flow(system, x0, p0, 2.0, 1e-3)
        h0 = traj.hamiltonian_values[0]
        assert traj.energy_drift <= 1e-6 * (1 + abs(h0))

    def test_curie_weiss_orbit_reaches_boundary(self):
        # the exact orbit hits x = 1 near t = 0.6925 with diverging momentum
        traj = hamilton_flow(curie_weiss(0.5), [0.2], [0.3], 2.0, 1e-3)
        assert traj.exited and 0.68 < traj.T < 0.6925
        assert traj.energy_drift < 1e-6

    def test_exit_truncates(self):
        traj = hamilton_flow(curie_weiss(0.5), [0.9], [5.0], 2.0, 1e-3)
        assert traj.exited and traj.T < 2.0

    def test_start_outside(self):
        with pytest.raises(DomainError):
            hamilton_flow(curie_weiss(0.5), [1.2], [0.0], 1.0, 1e-3)


class TestShooting:
    def test_ou_closed_form(self, ou_path):
        assert ou_path.momenta[0, 0] == pytest.approx(1 / math.sinh(1), abs=1e-5)
        exact = (math.e ** 2 - 1) / (4 * math.sinh(1) ** 2)
        assert interpolation_cost(ou_path) == pytest.approx(exact, abs=1e-4)

    def test_mckean_vlasov_endpoint(self):
        s = curie_weiss(0.5)
        xT = integrate_mckean_vlasov(s, [0.8], 1.0, 1e-3).states[-1]
        traj = shoot(s, [0.8], xT, 1.0, 1e-3)
        assert np.linalg.norm(traj.momenta[0]) <= 1e-6
        assert interpolation_cost(traj) <= 1e-8

    def test_stationary_endpoints(self):
        traj = shoot(curie_weiss(0.5), [0.0], [0.0], 1.0, 1e-2)
        assert np.allclose(traj.momenta, 0.0) and interpolation_cost(traj) == pytest.approx(0.0, abs=1e-14)

    def test_endpoint_accuracy(self, cw_path):
        assert abs(cw_path.states[-1, 0] - 0.5) <= 1e-8

    def test_cost_nonnegative(self, cw_path):
        assert np.all(cw_path.lagrangian >= -1e-12)

    def test_simplex(self):
        s = wright_fisher([1.0, 1.0, 1.0])
        traj = shoot(s, [0.5, 0.3, 0.2], [0.2, 0.3, 0.5], 1.0, 1e-2)
        assert np.allclose(traj.states[-1], [0.2, 0.3, 0.5], atol=1e-8)

    def test_degenerate_hamiltonian(self):
        with pytest.raises(UnsupportedOperationError):
            shoot(langevin(), [0.0, 0.0], [1.0, 0.0], 1.0, 1e-2)

    def test_outside(self):
        with pytest.raises(ShootingError):
            shoot(curie_weiss(0.5), [0.0], [1.5], 1.0, 1e-2)

    def test_cost_matches_lagrangian(self, cw_path):
        s = curie_weiss(0.5)
        assert np.allclose(cw_path.lagrangian, lagrangian_along(s, cw_path.states, cw_path.momenta))


class TestReversal:
    def test_mirror_paths_and_costs(self):
        s = curie_weiss(0.5)
        fwd = shoot(s, [-0.3], [0.6], 1.0, 1e-3)
        bwd = shoot(s, [0.6], [-0.3], 1.0, 1e-3)
        assert np.allclose(fwd.states[::-1], bwd.states, atol=1e-6)
        rev = reversed_cost_rate(s, fwd)
        fwd_total = interpolation_cost(fwd)
        rev_total = float(np.sum(0.5 * np.diff(fwd.times) * (rev[1:] + rev[:-1])))
        gap = float(s.S(np.array([0.6])) - s.S(np.array([-0.3])))
        assert fwd_total - rev_total == pytest.approx(gap, abs=1e-5)
        assert interpolation_cost(bwd) == pytest.approx(rev_total, abs=1e-5)

    def test_two_routes_agree(self, cw_path):
        s = curie_weiss(0.5)
        a = reversed_cost_rate(s, cw_path)
        b = reversed_cost_rate_direct(s, cw_path)
        assert np.allclose(a[1:-1], b[1:-1], atol=1e-10)

    @pytest.mark.parametrize("name", ["cw", "ou"])
    def test_time_reversal(self, name, cw_path, ou_path):
        traj, s = (cw_path, curie_weiss(0.5)) if name == "cw" else (ou_path, ornstein_uhlenbeck())
        chk = time_reversal_check(s, traj)
        assert chk.adjoint_residual < 1e-4 and chk.symmetrized_residual < 1e-4

    def test_time_reversal_of_flow(self):
        s = wright_fisher_1d([1.0, 1.0])
        traj = hamilton_flow(s, [0.8], [0.0], 1.0, 1e-3)
        assert time_reversal_check(s, traj).max < 1e-4

    def test_stationary_reversal(self):
        s = curie_weiss(0.5)
        traj = hamilton_flow(s, [0.0], [0.0], 1.0, 1e-2)
        assert time_reversal_check(s, traj).max == pytest.approx(0.0, abs=1e-14)

    def test_entropy_identity(self, cw_path):
        assert entropy_derivative_identity_residual(curie_weiss(0.5), cw_path) < 1e-4

    def test_entropy_identity_on_flow(self):
        s = wright_fisher_1d([2.0, 1.0])
        traj = hamilton_flow(s, [0.8], [0.0], 1.0, 1e-3)
        assert entropy_derivative_identity_residual(s, traj) < 1e-4


class TestGreenKernel:
    def test_values(self):
        assert green_kernel(1.0, 0.0, 0.3) == 0.0
        assert green_kernel(1.0, 0.5, 0.5) == pytest.approx(0.25)
        assert green_kernel(2.0, 0.5, 1.5) == pytest.approx(0.125)

    def test_range(self):
        with pytest.raises(DomainError):
            green_kernel(1.0, -0.1, 0.5)
        with pytest.raises(DomainError):
            green_kernel(1.0, 0.5, 1.2)

    @given(st.floats(0.1, 5.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_symmetric_and_bounded(self, T, a, b):
        s, t = a * T, b * T
        g = green_kernel(T, s, t)
        assert g == pytest.approx(green_kernel(T, t, s), abs=1e-14)
        assert -1e-15 <= g <= T / 4 + 1e-15

    @given(st.floats(0.5, 3.0), st.floats(0.05, 0.95))
    def test_reproduces_linear_deviation(self, T, a):
        # phi(t) = t^2: chord minus phi equals the kernel integral of phi'' = 2
        t = a * T
        s = np.linspace(0.0, T, 4001)
        g = 2.0 * green_kernel(T, s, t)
        integral = float(np.sum(0.5 * np.diff(s) * (g[1:] + g[:-1])))
        chord = t / T * T ** 2
        assert chord - t ** 2 == pytest.approx(integral, abs=1e-6)


class TestConvexity:
    def test_optimal_passes_and_larger_fails(self, cw_path):
        s = curie_weiss(0.5)
        good = convexity_report(s, cw_path, 2.0)
        assert good.passed, good.to_json()
        assert not convexity_report(s, cw_path, 3.0).passed

    def test_zero_kappa(self, cw_path):
        rep = convexity_report(curie_weiss(0.5), cw_path, 0.0)
        assert rep.passed and set(rep.forms) == {"b", "c", "d"}

    def test_mckean_vlasov_form_d(self):
        s = curie_weiss(0.0)
        traj = hamilton_flow(s, [0.9], [0.0], 1.0, 1e-3)
        assert convexity_report(s, traj, 4.0).form_passed("d")

    def test_json(self, cw_path):
        js = convexity_report(curie_weiss(0.5), cw_path, 2.0).to_json()
        assert js["passed"] is True and {"t", "lhs", "rhs", "margin"} <= set(js["forms"]["d"]["points"][0])


class TestInteriorCheck:
    @pytest.mark.parametrize("system", [curie_weiss(0.0), curie_weiss(0.5), curie_weiss(1.0),
                                        wright_fisher_1d([1.0, 1.0]), wright_fisher_1d([1.0, 2.0]),
                                        wright_fisher_1d([2.0, 1.0])], ids=lambda s: s.label)
    def test_built_in_models_pass(self, system):
        rep = interior_assumption_check(system)
        assert rep.passed, rep.to_json()["conditions"]
        for side in ("lower", "upper"):
            assert rep.conditions["d"].detail[side]["last"] > 1e3

    def test_outward_drift_detected(self):
        # OU centred at 5 on [0, 1]: the drift points out through the upper end
        s = ornstein_uhlenbeck({"polynomial": [[12.5, -5.0, 0.5]]}, domain=([0.0], [1.0]))
        rep = interior_assumption_check(s)
        assert not rep.conditions["b"].passed

    def test_needs_bounded_interval(self):
        with pytest.raises(DomainError):
            interior_assumption_check(ornstein_uhlenbeck())
