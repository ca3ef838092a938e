import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson.circle import (Arc, AtomicMeasure, ClosedSet, DyadicArc, circular_distance,
                             format_closed_set, format_measure, parse_closed_set, parse_measure,
                             whitney_decompose, wrap)
from carleson.errors import ParseError, RangeError

positions = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)
masses = st.floats(1e-6, 10.0, allow_nan=False)
atoms = st.lists(st.tuples(positions, masses), min_size=1, max_size=30)


def measure(pairs):
    return AtomicMeasure([p for p, _ in pairs], [m for _, m in pairs])


def test_wrap_and_distance():
    assert wrap(1.25) == 0.25
    assert wrap(-1e-18) == 0.0
    assert circular_distance(0.95, 0.05) == pytest.approx(0.1)


def test_arc_rejects_bad_length():
    with pytest.raises(RangeError):
        Arc(0.1, 0.0)
    with pytest.raises(RangeError):
        Arc(0.1, 1.5)


def test_dyadic_family():
    d = DyadicArc(3, 5)
    a, b = d.children()
    assert a.parent() == d and b.parent() == d
    assert d.contains_arc(a) and not a.contains_arc(d)
    assert DyadicArc.of_point(0.7, 3) == DyadicArc(3, 5)
    with pytest.raises(RangeError):
        DyadicArc(49, 0)


def test_measure_merges_duplicates():
    mu = AtomicMeasure([0.5, 1.5, 0.2], [1.0, 2.0, 0.0])
    assert len(mu) == 1
    assert mu.total() == 3.0


@given(atoms)
def test_measure_text_roundtrip(pairs):
    mu = measure(pairs)
    assert parse_measure(format_measure(mu)) == mu


@given(atoms, positions, st.floats(1e-3, 1.0))
def test_arc_mass_matches_brute_force(pairs, left, length):
    mu = measure(pairs)
    arc = Arc(left, length)
    inside = arc.contains(mu.positions)
    assert mu.mass_of(arc) == pytest.approx(mu.masses[inside].sum(), rel=1e-12, abs=1e-15)


@given(atoms, st.integers(0, 12))
def test_dyadic_masses_sum_to_total(pairs, n):
    mu = measure(pairs)
    assert math.fsum(mu.dyadic_masses(n)) == pytest.approx(mu.total(), rel=1e-12)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_measure("0.1 1.0\n")
    with pytest.raises(ParseError):
        parse_measure("# atomic-measure v1\n0.1\n")
    with pytest.raises(ParseError):
        parse_measure("# atomic-measure v1\n0.1 -1\n")
    with pytest.raises(ParseError):
        parse_closed_set("# closed-set v1\nhole 0 0.1\n")


def test_closed_set_from_points():
    E = ClosedSet.from_points([0.1, 0.6])
    assert sorted(E.gap_len.tolist()) == pytest.approx([0.5, 0.5])
    assert E.is_zero_length()
    assert E.contains(np.array([0.1, 0.6])).all()
    assert not E.contains(np.array([0.3]))[0]
    assert [E.count_meeting(n) for n in range(4)] == [1, 2, 2, 2]


@given(st.lists(positions, min_size=1, max_size=20, unique=True))
def test_closed_set_roundtrip(pts):
    E = ClosedSet.from_points(pts)
    F = parse_closed_set(format_closed_set(E))
    assert np.allclose(F.gap_len, E.gap_len) and np.allclose(F.gap_left, E.gap_left)
    assert math.fsum(E.gap_len) + E.residual_length() == pytest.approx(1.0)


@settings(max_examples=50)
@given(positions, st.floats(1e-6, 0.9), st.integers(1, 30))
def test_whitney_tiles_the_arc(left, length, depth):
    pieces = whitney_decompose(Arc(left, length), depth=depth)
    assert math.fsum(p.arc.length for p in pieces) == pytest.approx(length, rel=1e-12)
    for p in pieces:
        if p.remainder or p.level == 0:
            continue
        # distance to the nearer end of J equals the piece length
        off = (p.arc.left - left) % 1.0
        near = min(off, length - off - p.arc.length)
        assert near == pytest.approx(p.arc.length, rel=1e-9)
