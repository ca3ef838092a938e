import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from carleson.circle import AtomicMeasure
from carleson.constructions import CantorSpec, cantor_measure
from carleson.corona import (check_decomposition, corona_decompose, extract_bc_sets,
                             horodisc_integral, light_density_check, sublevel_area_integral,
                             threshold_for_level, top_integral)
from carleson.errors import RangeError
from carleson.numerics import CONVERGES

atoms = st.lists(st.tuples(st.floats(0, 1, exclude_max=True), st.floats(1e-4, 3.0)),
                 min_size=1, max_size=25)

# area of {P > log 2} weighted by t^-sigma for one atom, from a 1-D quadrature of
# the exact width of the sublevel set at each height (independent of the boxes)
AREA_ORACLE = {
    (1.0, 1.0): 1.2875986660923269,
    (1.0, 1.3): 2.938408418674166,
    (0.1, 1.0): 0.13964397884169477,
    (0.1, 1.3): 0.5907956432176721,
}


@pytest.mark.parametrize("m,sigma", sorted(AREA_ORACLE))
def test_single_atom_area(m, sigma):
    rep = sublevel_area_integral(AtomicMeasure([0.0], [m]), math.log(2), sigma)
    assert rep.status == CONVERGES
    assert rep.value == pytest.approx(AREA_ORACLE[m, sigma], rel=0.02)


@pytest.mark.parametrize("m,thr,T,sigma", [(1.0, 0.7, 0.1, 1.0), (0.01, 0.7, 1e-3, 1.3),
                                           (0.3, 2.0, 1.0, 1.45)])
def test_horodisc_closed_form(m, thr, T, sigma):
    a = 2 * m / thr
    top = min(T, a)
    ref, _ = integrate.quad(lambda t: math.sqrt(max(a * t - t * t, 0.0)) / math.pi * t ** -sigma,
                            0, top, limit=200)
    assert horodisc_integral(m, thr, T, sigma) == pytest.approx(ref, rel=1e-8)


def test_top_integral():
    assert top_integral(0, 1.0) == pytest.approx(math.log(2))
    L = 2.0 ** -5
    ref, _ = integrate.quad(lambda t: t ** -1.3, L / 2, L)
    assert top_integral(5, 1.3) == pytest.approx(L * ref)


def test_threshold_for_level():
    assert threshold_for_level(0.5) == pytest.approx(math.log(2))
    with pytest.raises(RangeError):
        threshold_for_level(1.0)


def test_empty_measure_area_is_zero():
    assert sublevel_area_integral(AtomicMeasure(), 0.5).value == 0.0


def test_area_is_monotone_in_mass():
    a = sublevel_area_integral(AtomicMeasure([0.2], [0.2]), math.log(2), 1.0).value
    b = sublevel_area_integral(AtomicMeasure([0.2], [0.4]), math.log(2), 1.0).value
    assert a < b


@settings(max_examples=30, deadline=None)
@given(atoms, st.floats(0.5, 20.0))
def test_corona_invariants(pairs, M):
    mu = AtomicMeasure([p for p, _ in pairs], [m for _, m in pairs])
    d = corona_decompose(mu, M, depth=14)
    chk = check_decomposition(d)
    assert chk["alternation"] and chk["maximality"] and chk["packing"] and chk["coverage_ok"]
    assert light_density_check(d)["ok"]


def test_extracted_sets_are_closed_subsets():
    d = corona_decompose(cantor_measure(CantorSpec(4.0, 6)), 1.0, depth=16)
    sets = extract_bc_sets(d)
    assert sets
    for s in sets:
        assert 0.0 <= s.E.residual_length() <= 2.0 ** -s.generation + 1e-15


def test_horodisc_needs_small_sigma():
    with pytest.raises(RangeError):
        horodisc_integral(1.0, 1.0, 1.0, 1.5)


def test_corona_rejects_bad_parameters():
    mu = AtomicMeasure([0.1], [1.0])
    with pytest.raises(RangeError):
        corona_decompose(mu, 0.0)
    with pytest.raises(RangeError):
        corona_decompose(mu, 1.0, light_ratio_divisor=1.0)
    with pytest.raises(RangeError):
        corona_decompose(mu, 1.0, depth=60)
