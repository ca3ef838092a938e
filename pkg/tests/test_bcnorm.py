import math

import pytest

from carleson.bcnorm import (arc_sum, comparability_report, diffuse_criterion, distance_integral,
                            dyadic_arc_sum, gap_distance_integral, local_criterion,
                            privalov_integral)
from carleson.circle import AtomicMeasure, ClosedSet
from carleson.constructions import CantorSpec, cantor_set
from carleson.errors import RangeError
from carleson.gauge import EntropyLog, PowerAlpha
from carleson.numerics import CONVERGES, DIVERGES


def entropy(t):
    return -t * math.log(t)


def test_two_point_set():
    E = ClosedSet.from_points([0.1, 0.6])
    g = EntropyLog()
    assert arc_sum(E, g).value == pytest.approx(2 * entropy(0.5))
    # each gap of length L: 2 * (L/2)(1 - log(L/2))
    assert distance_integral(E, g).value == pytest.approx(2 * 0.5 * (1 - math.log(0.25)))
    # one arc at generation 0, two at every later one: 1 + sum 2 * 2^-n = 3
    assert dyadic_arc_sum(E, g, 40).upper == pytest.approx(3.0, rel=1e-6)
    assert privalov_integral(E, g, 40).upper == pytest.approx(3 * math.log(2), rel=1e-6)


@pytest.mark.parametrize("A,G", [(3.0, 6), (4.0, 5), (6.0, 4)])
def test_cantor_arc_sum(A, G):
    E, census = cantor_set(CantorSpec(A, G))
    ref = math.fsum(2 ** (n - 1) * entropy(A ** -(n - 1) * (1 - 2 / A)) for n in range(1, G + 1))
    assert arc_sum(E, EntropyLog()).value == pytest.approx(ref, rel=1e-12)
    assert census == {n: 2 ** (n - 1) for n in range(1, G + 1)}


def test_positive_length_set_is_interval_valued():
    E, _ = cantor_set(CantorSpec(4.0, 3))
    q = distance_integral(E, EntropyLog())
    assert q.upper == math.inf


@pytest.mark.parametrize("g", [EntropyLog(), PowerAlpha(0.4), PowerAlpha(0.6, "exact")])
def test_gap_integral_closed_form_matches_quad(g):
    for L in (1e-6, 0.01, 0.3, 1.0):
        assert gap_distance_integral(L, g) == pytest.approx(gap_distance_integral(L, g, "quad"),
                                                            rel=1e-8)


def test_comparability_report_runs():
    E, _ = cantor_set(CantorSpec(4.0, 6))
    rep = comparability_report(E, EntropyLog(), 8).to_dict()
    assert set(rep) >= {"arc_sum", "distance_integral", "dyadic_arc_sum", "privalov_integral"}


def test_diffuse_criterion_examples():
    # entropy: int_0^{1/2} eps^-1/2 d eps = sqrt 2
    r = diffuse_criterion(EntropyLog(), lambda e: e ** 0.5)
    assert r.status == CONVERGES and r.value == pytest.approx(math.sqrt(2), rel=1e-6)
    # power 1/2: (1 - a) int eps^(a-1) / w; w = eps^1/4 gives 2 (1/2)^(1/4)
    r = diffuse_criterion(PowerAlpha(0.5), lambda e: e ** 0.25)
    assert r.status == CONVERGES and r.value == pytest.approx(2 * 0.5 ** 0.25, rel=1e-6)
    # w = eps^1/2 leaves 0.5 / eps
    assert diffuse_criterion(PowerAlpha(0.5), lambda e: e ** 0.5).status == DIVERGES
    # eps^-1 / log(1/eps) diverges like log log
    r = diffuse_criterion(PowerAlpha(0.5), lambda e: e ** 0.5 * math.log(1 / e))
    assert r.status == DIVERGES


def test_diffuse_scaling_invariance():
    w = lambda e: e ** 0.5 * math.log(1 / e)
    a = diffuse_criterion(PowerAlpha(0.5), w).status
    b = diffuse_criterion(PowerAlpha(0.5), lambda e: 7.0 * w(e)).status
    assert a == b


def test_diffuse_needs_decreasing_ratio():
    with pytest.raises(RangeError):
        diffuse_criterion(EntropyLog(), lambda e: e)


def test_local_criterion():
    mu = AtomicMeasure([0.3], [1.0])
    r = local_criterion(mu, 0.3, EntropyLog())
    assert r.status == CONVERGES and r.value == pytest.approx(1.0)
    assert local_criterion(mu, 0.4, EntropyLog()).status == DIVERGES
    two = AtomicMeasure([0.3, 0.5], [1.0, 1.0])
    # mass 1 up to eps = 0.2, then 2
    assert local_criterion(two, 0.3, EntropyLog()).value == pytest.approx(0.2 + 0.8 / 2)
