import numpy as np
import pytest

from entroflow.core import verify_derivatives
from entroflow.errors import ConfigError
from entroflow.interpolation import eci_estimate
from entroflow.models import curie_weiss, ornstein_uhlenbeck, wright_fisher
from entroflow.models.curie_weiss import curie_weiss_two_state
from entroflow.tensor import ProjectionMap, empirical_product, product, project_momentum, project_state


def test_product_sums_factors():
    a = ornstein_uhlenbeck()
    b = ornstein_uhlenbeck({"quadratic": [[4.0]]})
    s = product([a, b])
    x, p = np.array([1.0, 2.0]), np.array([0.5, 0.5])
    expect = a.H(x[:1], p[:1]) + b.H(x[1:], p[1:])
    assert float(s.H(x, p)) == pytest.approx(float(expect))
    assert float(s.S(x)) == pytest.approx(float(a.S(x[:1]) + b.S(x[1:])))


def test_product_blocks_are_diagonal():
    s = product([curie_weiss(0.5), ornstein_uhlenbeck()])
    m = s.H_pp(np.array([0.2, 1.0]), np.array([0.3, 0.1]))
    assert m[0, 1] == 0.0 and m[1, 0] == 0.0
    assert verify_derivatives(s).passed


def test_product_ou_eci_min_rule():
    s = product([ornstein_uhlenbeck(), ornstein_uhlenbeck({"quadratic": [[4.0]]})])
    rep = eci_estimate(s, form="reversible")
    assert rep.kappa_estimate == pytest.approx(2.0, abs=1e-6)


def test_marginals():
    P = ProjectionMap((2, 2))
    x = np.array([0.4, 0.1, 0.3, 0.2])
    assert np.allclose(project_state(P, 0, x), [0.5, 0.5])
    assert np.allclose(project_state(P, 1, x), [0.7, 0.3])
    assert np.allclose(project_state(P, 0, np.full(4, 0.25)), [0.5, 0.5])


def test_point_mass_projects_to_point_mass():
    P = ProjectionMap((2, 3))
    for q in range(6):
        x = np.zeros(6)
        x[q] = 1.0
        i, j = P.table[q]
        assert project_state(P, 0, x)[i] == 1.0 and project_state(P, 1, x)[j] == 1.0


def test_constant_momentum_counts_fibres():
    P = ProjectionMap((2, 3))
    assert np.allclose(project_momentum(P, 0, np.full(6, 2.0)), [6.0, 6.0])
    assert np.allclose(project_momentum(P, 1, np.full(6, 2.0)), [4.0, 4.0, 4.0])


def test_projection_errors():
    P = ProjectionMap((2, 2))
    with pytest.raises(IndexError):
        project_state(P, 2, np.full(4, 0.25))
    with pytest.raises(ConfigError):
        ProjectionMap((2,) * 13)


def test_single_factor_reduction():
    f = wright_fisher([1.0, 2.0, 1.5])
    s = empirical_product([f], ProjectionMap((3,)), [0.5])
    x, p = np.array([0.2, 0.3, 0.5]), np.array([0.4, -0.1, 0.2])
    assert float(s.H(x, p)) == pytest.approx(0.5 * float(f.H(x, p)), abs=1e-14)
    assert float(s.S(x)) == pytest.approx(float(f.S(x)), abs=1e-14)


def test_empirical_product_mismatch():
    with pytest.raises(ConfigError):
        empirical_product([curie_weiss_two_state(0.0)], ProjectionMap((2, 2)))
    with pytest.raises(ConfigError):
        empirical_product([curie_weiss(0.0)], ProjectionMap((2,)))


def test_empirical_product_derivatives_and_stationarity():
    from entroflow.core import stationarity_residual
    s = empirical_product([curie_weiss_two_state(0.5), curie_weiss_two_state(0.0)],
                          ProjectionMap((2, 2)), [0.5, 0.5])
    assert verify_derivatives(s).passed
    xs = s.default_grid.states(s.domain, s.coords)
    assert np.max(stationarity_residual(s, xs)) < 1e-8
