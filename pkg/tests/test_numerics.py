import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from carleson.circle import AtomicMeasure
from carleson.errors import RangeError
from carleson.numerics import (CONVERGES, DIVERGES, INCONCLUSIVE, adaptive_simpson,
                               classify_series, gauss_legendre, loglog_slope, pairwise_sum)
from carleson.parallel import ordered_map, thread_count
from carleson.pipelines import sequence_verdict, nevanlinna_pipeline, hardy_pipeline


@given(st.floats(0.05, 0.7), st.floats(0.1, 10.0))
def test_geometric_series(r, a):
    v = classify_series([a * r ** k for k in range(30)])
    assert v.status == CONVERGES
    assert v.value + v.tail == pytest.approx(a / (1 - r), rel=1e-6)


def test_growing_series():
    assert classify_series([1.0] * 12).status == DIVERGES
    assert classify_series([1.1 ** k for k in range(12)]).status == DIVERGES
    assert classify_series([]).status == CONVERGES


def test_negative_terms_rejected():
    with pytest.raises(ValueError):
        classify_series([1.0, -1.0])


@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_loglog_slope(s, c):
    x = np.logspace(0, 3, 8)
    assert loglog_slope(x, c * x ** s) == pytest.approx(s, abs=1e-9)


@given(st.lists(st.floats(-1e6, 1e6), max_size=200))
def test_pairwise_sum(xs):
    assert pairwise_sum(xs) == pytest.approx(math.fsum(xs), abs=1e-6)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(4)
    # nodes on [0, 1]; degree 7 is integrated exactly
    assert float(np.sum(w * x ** 7)) == pytest.approx(1 / 8, rel=1e-13)


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0, math.pi) == pytest.approx(2.0, rel=1e-9)


def test_sequence_verdict():
    assert sequence_verdict([1, 2, 3], [CONVERGES] * 2 + [DIVERGES])[0] == DIVERGES
    assert sequence_verdict([1, 2, 3], [CONVERGES, INCONCLUSIVE, CONVERGES])[0] == INCONCLUSIVE
    conv = [2 - 0.5 ** k for k in range(8)]
    assert sequence_verdict(conv, [CONVERGES] * 8)[0] == CONVERGES
    assert sequence_verdict([1.3 ** k for k in range(8)], [CONVERGES] * 8)[0] == DIVERGES


def test_single_atom_pipelines_hold():
    mu = AtomicMeasure([0.2], [1.0])
    for rep in (nevanlinna_pipeline(mu), hardy_pipeline(mu, 0.3)):
        assert rep.consistent
        assert all(c.status == CONVERGES for c in rep.conditions)


def test_thread_count(monkeypatch):
    monkeypatch.setenv("CARLESON_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("CARLESON_THREADS", "0")
    with pytest.raises(RangeError):
        thread_count()
    monkeypatch.setenv("CARLESON_THREADS", "many")
    with pytest.raises(RangeError):
        thread_count()


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setenv("CARLESON_THREADS", "4")
    assert ordered_map(lambda k: k * k, range(50)) == [k * k for k in range(50)]
