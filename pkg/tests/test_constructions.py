import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from carleson.circle import Arc, AtomicMeasure
from carleson.constructions import (CantorSpec, cantor_cdf, cantor_measure, cantor_set,
                                    equally_spaced_atoms, independent_copies, pruned_cantor,
                                    pruned_sums)
from carleson.errors import RangeError


@given(st.floats(2.1, 8.0), st.integers(0, 10))
def test_cantor_lengths(A, G):
    E, _ = cantor_set(CantorSpec(A, G))
    assert E.residual_length() == pytest.approx((2 / A) ** G, rel=1e-12)
    if G:
        assert E.gap_len.size == 2 ** G - 1


@given(st.floats(2.1, 8.0), st.integers(1, 10))
def test_cantor_measure_on_its_set(A, G):
    spec = CantorSpec(A, G)
    E, _ = cantor_set(spec)
    mu = cantor_measure(spec)
    assert len(mu) == 2 ** G
    assert mu.total() == pytest.approx(1.0)
    assert np.allclose(mu.masses, 2.0 ** -G)
    assert E.contains(mu.positions).all()


def test_cantor_cdf_self_similar():
    A = 4.0
    assert cantor_cdf(0.0, A) == 0.0
    assert cantor_cdf(0.5, A) == pytest.approx(0.5)
    # F(x / A) = F(x) / 2 on the left half
    for x in (0.1, 0.2, 0.25):
        assert cantor_cdf(x / A, A) == pytest.approx(cantor_cdf(x, A) / 2, abs=1e-12)


def test_cantor_spec_ranges():
    with pytest.raises(RangeError):
        CantorSpec(2.0, 3)
    with pytest.raises(RangeError):
        CantorSpec(3.0, 31)


@given(st.integers(1, 300), st.floats(0.05, 0.95))
def test_equally_spaced(n, eps):
    mu = equally_spaced_atoms(n, eps)
    assert len(mu) == n
    assert mu.total() == pytest.approx(n ** (eps - 1), rel=1e-12)


def test_independent_copies():
    a, b = AtomicMeasure([0.0, 0.5], [1.0, 1.0]), AtomicMeasure([0.25], [2.0])
    mu = independent_copies([a, b], [Arc(0.0, 0.5), Arc(0.5, 0.25)], [1.0, 0.5])
    assert mu.positions.tolist() == pytest.approx([0.0, 0.25, 0.5625])
    assert mu.total() == pytest.approx(3.0)
    with pytest.raises(RangeError):
        independent_copies([a, b], [Arc(0.0, 0.5), Arc(0.25, 0.5)])


def test_pruned_cantor_structure():
    pc = pruned_cantor(0.3, 1.15, 10)
    assert pc.E.contains(pc.mu.positions).all()
    assert pc.A > 2
    sums = pruned_sums(pc)
    assert len(sums.mass_terms) == len(sums.c1_terms) == len(sums.generations)
    assert all(t >= 0 for t in sums.mass_terms)
