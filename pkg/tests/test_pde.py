import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from carleson.circle import AtomicMeasure
from carleson.constructions import CantorSpec, cantor_measure, cantor_set
from carleson.errors import RangeError
from carleson.pde import (TentConfig, condition1_sum, condition2_sum, maximal_solution_radial,
                          mu_average_condition2, params_of_p, restoring_constant,
                          restoring_iteration, shoot, tent_heights, tent_profile)


def test_params_p5():
    prm = params_of_p(5.0)
    assert prm.alpha == pytest.approx(0.5)
    assert prm.C_alpha ** 4 == pytest.approx(0.75)


@given(st.floats(1.5, 40.0))
def test_halfplane_profile_solves_ode(p):
    prm = params_of_p(p)
    y = np.logspace(-2, 0, 7)
    assert np.max(np.abs(prm.residual(y))) < 1e-10


def test_params_range():
    with pytest.raises(RangeError):
        params_of_p(1.0)


def test_restoring_known_value():
    # alpha = 1/2, a = 1/4: a^(1/(alpha-1)) = 16, b = sqrt(2/17)
    assert restoring_constant(0.25, 0.5) == pytest.approx(math.sqrt(2 / 17), rel=1e-14)
    assert restoring_constant(1.0, 0.3) == 1.0


@given(st.floats(1e-6, 0.999999), st.floats(0.05, 0.95))
def test_restoring_increases(a, alpha):
    b = restoring_constant(a, alpha)
    assert a < b <= 1.0


def test_restoring_iteration_reaches_one():
    tr = restoring_iteration(0.01, 0.9)
    assert tr.converged and 1 - tr.values[-1] <= 1e-6
    assert all(x < y for x, y in zip(tr.values, tr.values[1:]))
    with pytest.raises(RangeError):
        restoring_iteration(0.0, 0.5)


def test_shooting_bracket():
    # tiny data survives to r = 1, big data blows up before it
    assert not shoot(1e-3, 5.0)[0]
    assert shoot(10.0, 5.0)[0]


def test_maximal_solution_asymptotics():
    prm = params_of_p(5.0)
    sol = maximal_solution_radial(5.0)
    assert abs(sol.normalized[-1] / prm.C_alpha - 1) < 0.05
    assert sol.blowup_radius == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(sol.u) > 0)


@given(st.floats(0, 1), st.floats(1.01, 5.0))
def test_tent_profile_under_hat(t, gamma):
    v = tent_profile(t, gamma)
    assert 0.0 <= v <= 1.0 - abs(2 * t - 1) + 1e-15
    assert tent_profile(0.5, gamma) == 1.0


def test_tent_config_validation():
    with pytest.raises(RangeError):
        TentConfig(3.0).validate(0.5)
    with pytest.raises(RangeError):
        TentConfig(1.5, psi=2.0).validate(0.5)
    TentConfig(1.5).validate(0.5)


def cantor(A=4.0, G=7):
    spec = CantorSpec(A, G)
    E, _ = cantor_set(spec)
    return E, cantor_measure(spec)


def test_tent_heights_bounded_by_gaps():
    E, mu = cantor()
    h = tent_heights(E, mu, 0.5, TentConfig(1.5, psi=0.5))
    assert np.all(h <= 0.5 * E.gap_len * (1 + 1e-12))
    assert np.all(h > 0)


@pytest.mark.parametrize("alpha,beta", [(0.5, 0.0), (0.3, 0.1), (0.8, 0.5)])
def test_condition1_hoelder_split(alpha, beta):
    E, mu = cantor()
    c = condition1_sum(E, mu, alpha, beta)
    assert c.holds


def test_mu_average_below_rearranged_bound():
    E, mu = cantor(3.5, 7)
    conf = TentConfig(1.5, psi=0.7)
    avg = mu_average_condition2(E, mu, 0.5, conf)
    assert avg.value <= avg.upper * (1 + 1e-12)
    # the average is the mu-integral of the pointwise sum
    direct = math.fsum(m * condition2_sum(E, mu, 0.5, x, conf)
                       for x, m in zip(mu.positions, mu.masses))
    assert avg.value == pytest.approx(direct, rel=1e-10)


def test_condition2_needs_point_of_E():
    E, mu = cantor()
    with pytest.raises(RangeError):
        condition2_sum(E, mu, 0.5, 0.4)
