import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson.circle import AtomicMeasure
from carleson.constructions import CantorSpec, cantor_measure, cantor_set
from carleson.errors import GridError, RangeError
from carleson.gauge import EntropyLog, PowerAlpha, build_grid
from carleson.roberts import charges_bc_test, dyadic_partition, grate, roberts_decompose

atoms = st.lists(st.tuples(st.floats(0, 1, exclude_max=True), st.floats(1e-4, 5.0)),
                 min_size=1, max_size=40)


def test_grate_caps_every_arc():
    mu = AtomicMeasure([0.1, 0.12, 0.7], [1.0, 1.0, 0.01])
    g = EntropyLog()
    part = dyadic_partition(2)
    res = grate(mu, part, 1.0, g)
    cap = g.phi(0.25)
    for arc in part:
        assert res.grated.mass_of(arc) <= cap * (1 + 1e-12)
    assert res.grated.total() + res.remainder.total() == pytest.approx(mu.total())
    # the light arc keeps its atom untouched
    assert 0.7 not in res.remainder.positions.tolist()
    assert 0.7 in res.grated.positions.tolist()


def test_grate_needs_a_tiling():
    with pytest.raises(RangeError):
        grate(AtomicMeasure([0.1], [1.0]), dyadic_partition(2)[:3], 1.0, EntropyLog())


@settings(max_examples=40, deadline=None)
@given(atoms, st.sampled_from(["entropy", "power"]), st.floats(0.2, 5.0))
def test_decomposition_conserves_and_respects_caps(pairs, kind, C):
    mu = AtomicMeasure([p for p, _ in pairs], [m for _, m in pairs])
    g = EntropyLog() if kind == "entropy" else PowerAlpha(0.5)
    layers = 4 if kind == "entropy" else 8
    d = roberts_decompose(mu, g, build_grid(g, layers), C=C, max_layers=layers)
    chk = d.check()
    assert chk["conservation_ok"] and chk["layer_bound_ok"] and chk["refines"]
    assert d.light_arc_entropy() <= d.bound() * (1 + 1e-12)


def test_grid_too_shallow():
    g = PowerAlpha(0.5)
    with pytest.raises(GridError):
        roberts_decompose(AtomicMeasure([0.1], [1.0]), g, build_grid(g, 3), max_layers=5)


def test_residual_support_contains_remaining_mass():
    spec = CantorSpec(4.0, 8)
    mu = cantor_measure(spec)
    g = PowerAlpha(0.5)
    d = roberts_decompose(mu, g, build_grid(g, 10), C=1.0, max_layers=10)
    S = d.residual_support()
    keep = d.residual_masses > 0
    assert S.contains(mu.positions[keep]).all()


def test_charges_rows():
    spec = CantorSpec(4.0, 10)
    E, _ = cantor_set(spec)
    mu = cantor_measure(spec)
    g = PowerAlpha(0.5)
    rows = charges_bc_test(mu, g, build_grid(g, 12), 1.0, [0, 2, 4], E=E, max_layers=6)
    assert [r.j0 for r in rows] == [0, 2, 4]
    for r in rows:
        assert r.residual_mass_on_set == pytest.approx(r.residual_mass)
        assert r.layer_mass_on_set + r.residual_mass_on_set == pytest.approx(1.0)
