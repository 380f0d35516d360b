import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entroflow.analysis import (decay_check, eii_estimate, information_decay_check, integrate_mckean_vlasov,
                                kappa_upper_bound, second_order_estimate, second_order_residual,
                                weak_second_order_residual)
from entroflow.core.domain import Axis, GridSpec
from entroflow.errors import EmptyScanError, PreconditionError
from entroflow.models import curie_weiss, langevin, ornstein_uhlenbeck, wright_fisher, wright_fisher_1d


class TestFlow:
    def test_ou_exact(self):
        traj = integrate_mckean_vlasov(ornstein_uhlenbeck(), [1.0], 1.0, 1e-3)
        assert traj.states[-1, 0] == pytest.approx(math.exp(-1), abs=1e-6)
        assert len(traj) == 1001

    def test_stationary_start(self):
        traj = integrate_mckean_vlasov(curie_weiss(0.5), [0.0], 1.0, 1e-2)
        assert np.all(traj.states == 0.0)

    def test_h_theorem(self):
        traj = integrate_mckean_vlasov(curie_weiss(0.5), [0.8], 5.0, 1e-3)
        assert traj.entropy[-1] < traj.entropy[0]
        assert np.all(np.diff(traj.entropy) <= 1e-15)

    def test_outside_start(self):
        with pytest.raises(PreconditionError):
            integrate_mckean_vlasov(curie_weiss(0.5), [1.5], 1.0, 1e-2)

    def test_partial_last_step(self):
        traj = integrate_mckean_vlasov(ornstein_uhlenbeck(), [1.0], 0.25, 0.1)
        assert traj.times.tolist() == pytest.approx([0.0, 0.1, 0.2, 0.25])

    def test_simplex_flow_stays_on_simplex(self):
        traj = integrate_mckean_vlasov(wright_fisher([1.0, 1.0, 1.0]), [0.7, 0.2, 0.1], 2.0, 1e-2)
        assert np.allclose(traj.states.sum(axis=1), 1.0, atol=1e-12)


class TestDecay:
    def test_optimal_rate_passes(self):
        traj = integrate_mckean_vlasov(curie_weiss(0.0), [0.9], 3.0, 1e-3)
        assert decay_check(traj, 4.0).passed
        assert information_decay_check(traj, 4.0).passed
        assert decay_check(traj, 0.0).passed

    def test_too_fast_fails(self):
        traj = integrate_mckean_vlasov(curie_weiss(0.5), [0.9], 3.0, 1e-3)
        assert decay_check(traj, 2.0).passed
        assert not decay_check(traj, 4.0).passed
        assert not decay_check(curie_weiss_traj(), 10.0).passed

    def test_stationary_information(self):
        traj = integrate_mckean_vlasov(curie_weiss(0.5), [0.0], 1.0, 1e-2)
        assert information_decay_check(traj, 5.0).passed

    def test_report_fields(self):
        rep = decay_check(curie_weiss_traj(), 4.0)
        js = rep.to_json()
        assert js["passed"] is True and js["quantity"] == "entropy"


def curie_weiss_traj():
    return integrate_mckean_vlasov(curie_weiss(0.0), [0.9], 3.0, 1e-3)


class TestEII:
    def test_ou(self):
        assert eii_estimate(ornstein_uhlenbeck()).kappa_estimate == pytest.approx(2.0, abs=1e-9)

    def test_curie_weiss_zero(self):
        grid = GridSpec((Axis(-0.999, 0.999, 2001),), (Axis(0.0, 0.0, 1),), margin=0.0)
        assert eii_estimate(curie_weiss(0.0), grid).kappa_estimate == pytest.approx(4.0, abs=0.05)

    def test_empty_scan(self):
        with pytest.raises(EmptyScanError):
            eii_estimate(ornstein_uhlenbeck(), s_floor=1e9)

    def test_points(self):
        rep, xs, ratio = eii_estimate(ornstein_uhlenbeck(), return_points=True)
        assert len(xs) == len(ratio) == rep.n_grid


class TestSecondOrder:
    def test_wright_fisher_three_types(self):
        s = wright_fisher([1.0, 1.0, 1.0])
        xs = s.default_grid.states(s.domain, s.coords)
        assert np.all(second_order_residual(s, xs, 1.5) >= -1e-10)

    def test_vanishes_at_stationary_point(self):
        s = curie_weiss(0.5)
        assert second_order_residual(s, np.array([0.0]), 3.0) == pytest.approx(0.0, abs=1e-15)

    def test_ou_estimate(self):
        assert second_order_estimate(ornstein_uhlenbeck()).kappa_estimate == pytest.approx(2.0, abs=1e-9)

    @settings(max_examples=30)
    @given(st.floats(-0.95, 0.95))
    def test_weak_form_bounds_full_form_for_convex_entropy(self, x):
        s = curie_weiss(0.5)
        xv = np.array([x])
        assert weak_second_order_residual(s, xv, 1.0) <= second_order_residual(s, xv, 1.0) + 1e-12


class TestKappaUpperBound:
    def test_ou(self):
        assert kappa_upper_bound(ornstein_uhlenbeck(), [0.0]) == pytest.approx(2.0)
        s = ornstein_uhlenbeck({"quadratic": [[1.0, 0.0], [0.0, 4.0]]})
        assert kappa_upper_bound(s, [0.0, 0.0]) == pytest.approx(2.0)

    def test_wright_fisher(self):
        assert kappa_upper_bound(wright_fisher_1d([1.0, 1.0]), [0.5]) == pytest.approx(2.0)

    @pytest.mark.parametrize("beta", [0.0, 0.5, 0.9])
    def test_curie_weiss(self, beta):
        assert kappa_upper_bound(curie_weiss(beta), [0.0]) == pytest.approx(4 * (1 - beta))

    def test_simplex_tangent_directions(self):
        # full simplex, mu = (1,1): same constant as the interval reduction
        assert kappa_upper_bound(wright_fisher([1.0, 1.0]), [0.5, 0.5]) == pytest.approx(2.0)

    def test_not_stationary(self):
        with pytest.raises(PreconditionError):
            kappa_upper_bound(curie_weiss(0.5), [0.3])

    def test_degenerate_entropy(self):
        with pytest.raises(PreconditionError):
            kappa_upper_bound(curie_weiss(1.0), [0.0])

    def test_matrix_criterion(self):
        s = ornstein_uhlenbeck({"quadratic": [[1.0, 0.0], [0.0, 4.0]]})
        assert kappa_upper_bound(s, [0.0, 0.0], method="matrix") == pytest.approx(8.0)
        assert kappa_upper_bound(curie_weiss(0.5), [0.0], method="matrix") == pytest.approx(2.0)

    def test_langevin(self):
        # the position direction carries entropy but no dissipation
        assert kappa_upper_bound(langevin(), [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)
        assert kappa_upper_bound(langevin(), [0.0, 0.0], method="matrix") == pytest.approx(2.0)
