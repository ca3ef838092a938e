import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from carleson.errors import ParseError, RangeError
from carleson.gauge import EntropyLog, PowerAlpha, build_grid, check_regularity, parse_gauge

ts = st.floats(1e-12, 0.99)


@given(ts)
def test_entropy_closed_forms(t):
    g = EntropyLog()
    assert g.phi(t) == pytest.approx(-t * math.log(t), rel=1e-12)
    assert g.phi1(t) == pytest.approx(math.log(1 / t), rel=1e-12)
    # phi(t) = t int_t^1 ds / lambda(s)
    assert g.phi(t) == pytest.approx(t * g.inv_lambda_integral(t, 1.0), rel=1e-12)


@given(st.floats(0.05, 0.95), ts)
def test_power_identity_variant(a, t):
    g = PowerAlpha(a, "exact")
    assert g.phi(t) == pytest.approx(t * g.inv_lambda_integral(t, 1.0), rel=1e-10)
    n = PowerAlpha(a)
    # the variants differ by exactly t, up to cancellation against t^a
    assert n.phi(t) - g.phi(t) == pytest.approx(t, abs=1e-15 * n.phi(t))


def test_phi1_integral_against_quadrature():
    from scipy import integrate
    for g in (EntropyLog(), PowerAlpha(0.3), PowerAlpha(0.7, "exact")):
        for x in (1e-3, 0.2, 0.5):
            ref, _ = integrate.quad(lambda s: float(g.phi1(s)), 0, x, limit=200)
            assert g.phi1_integral(x) == pytest.approx(ref, rel=1e-8)


def test_standard_grids():
    assert build_grid(EntropyLog(), 5).generations == (2, 4, 8, 16, 32)
    assert build_grid(PowerAlpha(0.5), 4).generations == (1, 2, 3, 4)


def test_grid_beyond_cap():
    with pytest.raises(Exception):
        build_grid(EntropyLog(), 6)


def test_regularity_of_standard_gauges():
    for g in (EntropyLog(), PowerAlpha(0.5)):
        rep = check_regularity(g)
        assert not rep.violations
        assert 1.0 <= rep.g2_min <= rep.g2_max <= 4.0


def test_parse_gauge():
    assert isinstance(parse_gauge("entropy"), EntropyLog)
    g = parse_gauge("power:0.25:exact")
    assert g.alpha == 0.25 and g.variant == "exact"
    with pytest.raises(ParseError):
        parse_gauge("power:x")
    with pytest.raises(ParseError):
        parse_gauge("nonsense")
    with pytest.raises(RangeError):
        parse_gauge("power:1.5")
