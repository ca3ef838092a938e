"""Four comparable Beurling-Carleson quantities and two pointwise criteria.

For a closed zero-length set E with complementary arcs J_k and a gauge phi:

* arc sum            sum_k phi(|J_k|)
* distance integral  int phi1(dist(x, E)) dx = sum_k 2 int_0^{|J_k|/2} phi1
* dyadic arc sum     sum over dyadic I meeting E of |I|^2 / lambda(|I|)
* Privalov integral  sum over the same I of the top-box integral
                     |I| * int_{|I|/2}^{|I|} dt / lambda(t)

The dyadic quantities are truncated at a depth and carry a tail estimate or
divergence evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy import integrate

from .circle import GENERATION_CAP, AtomicMeasure, ClosedSet, circular_distance, wrap
from .errors import RangeError
from .gauge import Gauge
from .numerics import CONVERGES, DIVERGES, SeriesVerdict, classify_series

EXACT = "exact"
INTERVAL = "interval"


@dataclass
class Quantity:
    """A possibly truncated value. ``upper`` is ``inf`` when divergent."""

    value: float
    upper: float
    status: str
    terms: list = field(default_factory=list, repr=False)

    @property
    def diverging(self) -> bool:
        return self.status == DIVERGES

    def to_dict(self) -> dict:
        return {"value": self.value, "upper": self.upper, "status": self.status}


RESOLVED = "resolved"


def arc_sum(E: ClosedSet, g: Gauge, resolution: float | None = None) -> Quantity:
    """Sum of phi over the enumerated gaps.

    With a ``resolution`` s, the sum is taken at that scale instead: every gap
    shorter than s and every residual arc counts as |J| * phi1(s), i.e. the
    sum of |J| phi1(max(|J|, s)) over all pieces. This is the truncation that
    matches a dyadic sum cut at depth log2(1/s).
    """
    if resolution is not None:
        s = _check_resolution(resolution)
        p1s = float(g.phi1(s))
        big = E.gap_len >= s
        value = math.fsum(np.atleast_1d(g.phi(E.gap_len[big]))) if big.any() else 0.0
        value += (math.fsum(E.gap_len[~big]) + math.fsum(E.res_len)) * p1s
        return Quantity(value, value, RESOLVED)
    value = math.fsum(np.atleast_1d(g.phi(E.gap_len))) if E.gap_len.size else 0.0
    if E.is_zero_length():
        return Quantity(value, value, EXACT)
    extra = math.fsum(np.atleast_1d(g.phi(E.res_len)))
    return Quantity(value, value + extra, INTERVAL)


def gap_distance_integral(L: float, g: Gauge, method: str = "closed") -> float:
    """2 int_0^{L/2} phi1(s) ds for one complementary arc of length L."""
    if method == "closed":
        return 2.0 * g.phi1_integral(0.5 * L)
    if method == "quad":
        val, err = integrate.quad(lambda s: float(g.phi1(s)), 0.0, 0.5 * L, limit=200,
                                  epsabs=1e-13, epsrel=1e-12)
        return 2.0 * val
    raise RangeError(f"unknown method {method!r}")


def _check_resolution(s: float) -> float:
    s = float(s)
    if not (0.0 < s <= 1.0):
        raise RangeError("resolution must lie in (0, 1]")
    return s


def _resolved_gap_integral(L: float, g: Gauge, s: float, p1s: float) -> float:
    """2 int_0^{L/2} phi1(max(x, s)) dx."""
    h = 0.5 * L
    if h <= s:
        return L * p1s
    return 2.0 * (g.phi1_integral(h) - g.phi1_integral(s) + s * p1s)


def distance_integral(E: ClosedSet, g: Gauge, method: str = "closed",
                      resolution: float | None = None) -> Quantity:
    """int phi1(dist(x, E)) dx, or int phi1(max(dist, s)) dx at resolution s."""
    if resolution is not None:
        s = _check_resolution(resolution)
        p1s = float(g.phi1(s))
        lengths, counts = np.unique(E.gap_len, return_counts=True)
        per = [_resolved_gap_integral(L, g, s, p1s) * c for L, c in zip(lengths, counts)]
        value = math.fsum(per) + math.fsum(E.res_len) * p1s
        return Quantity(value, value, RESOLVED)
    if E.gap_len.size:
        lengths, counts = np.unique(E.gap_len, return_counts=True)
        per = np.array([gap_distance_integral(L, g, method) for L in lengths])
        value = math.fsum(per * counts)
    else:
        value = 0.0
    if E.is_zero_length():
        return Quantity(value, value, EXACT)
    # phi1(0) is infinite, so any residual arc of positive length diverges
    return Quantity(value, math.inf, INTERVAL)


def _check_depth(depth: int) -> None:
    if depth < 0 or depth > GENERATION_CAP:
        raise RangeError(f"depth {depth} outside [0, {GENERATION_CAP}]")


def _series(terms: list) -> Quantity:
    verdict: SeriesVerdict = classify_series(terms)
    return Quantity(verdict.value, verdict.value + verdict.tail, verdict.status, list(terms))


def dyadic_counts(E: ClosedSet, depth: int) -> list[int]:
    _check_depth(depth)
    return [E.count_meeting(n) for n in range(depth + 1)]


def dyadic_arc_sum(E: ClosedSet, g: Gauge, depth: int) -> Quantity:
    counts = dyadic_counts(E, depth)
    terms = []
    for n, c in enumerate(counts):
        t = math.ldexp(1.0, -n)
        terms.append(c * t * t / float(g.lam(t)))
    return _series(terms)


def privalov_integral(E: ClosedSet, g: Gauge, depth: int) -> Quantity:
    counts = dyadic_counts(E, depth)
    terms = []
    for n, c in enumerate(counts):
        t = math.ldexp(1.0, -n)
        terms.append(c * t * float(g.inv_lambda_integral(0.5 * t, t)))
    return _series(terms)


QUANTITIES = ("arc_sum", "distance_integral", "dyadic_arc_sum", "privalov_integral")


@dataclass
class ComparabilityReport:
    arc_sum: Quantity
    distance_integral: Quantity
    dyadic_arc_sum: Quantity
    privalov_integral: Quantity
    depth: int
    gauge: str
    ratios: dict
    K: float
    zero_length_at_depth: bool

    def to_dict(self) -> dict:
        out = {name: getattr(self, name).to_dict() for name in QUANTITIES}
        out.update(depth=self.depth, gauge=self.gauge, ratios=self.ratios, K=self.K,
                   zero_length_at_depth=self.zero_length_at_depth)
        return out


def comparability_report(E: ClosedSet, g: Gauge, depth: int) -> ComparabilityReport:
    """Run all four quantities at one truncation depth and compare them.

    The arc sum and distance integral are taken at resolution 2^-depth so
    that all four see the set down to the same scale. Residual arcs longer
    than 2^-depth mean the set has visible positive length at this
    resolution; all four entries are then flagged divergent.
    """
    _check_depth(depth)
    s = math.ldexp(1.0, -depth)
    resolved = E.max_residual() <= s
    qs = [arc_sum(E, g, resolution=s), distance_integral(E, g, resolution=s),
          dyadic_arc_sum(E, g, depth),
          privalov_integral(E, g, depth)]
    if not resolved:
        qs = [Quantity(q.value, math.inf, DIVERGES, q.terms) for q in qs]
    ratios = {}
    K = 1.0
    for (i, a), (j, b) in combinations(enumerate(QUANTITIES), 2):
        va, vb = qs[i].value, qs[j].value
        r = va / vb if vb > 0 else (math.inf if va > 0 else 1.0)
        ratios[f"{a}/{b}"] = r
        if r > 0:
            K = max(K, r, 1.0 / r)
        else:
            K = math.inf
    return ComparabilityReport(*qs, depth=depth, gauge=g.describe(), ratios=ratios, K=K,
                               zero_length_at_depth=resolved)


# -- pointwise criteria ------------------------------------------------------

@dataclass
class CriterionResult:
    status: str
    value: float
    terms: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": self.status, "value": self.value}


def diffuse_criterion(g: Gauge, w: Callable, eps_max: float = 0.5,
                      blocks: int = 9) -> CriterionResult:
    """int_0 eps / (lambda(eps) w(eps)) d eps, with divergence detection.

    The integral is split into blocks on which log(1/eps) doubles, i.e. eps
    runs over [2^-2^(k+1), 2^-2^k] when eps_max = 1/2. Doubling blocks make a
    log-log divergence visible as constant block contributions. Each block is
    integrated in the variable u = log(1/eps), with the integrand written as
    (eps / lambda) * (eps / w) to avoid underflow.
    """
    u0 = -math.log(eps_max)
    edges = u0 * np.ldexp(1.0, np.arange(blocks + 1))
    if edges[-1] > 740.0:
        raise RangeError("too many blocks for double precision")
    probe = np.exp(-np.linspace(u0, edges[-1], 400))[::-1]
    ratio = np.array([w(e) for e in probe]) / probe
    if not np.all(np.diff(ratio) < 0):
        raise RangeError("w(eps)/eps must be strictly decreasing")

    def f(u):
        e = math.exp(-u)
        return (e / float(g.lam(e))) * (e / w(e))

    terms = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, a, b, limit=200, epsrel=1e-10)
        terms.append(val)
    verdict = classify_series(terms, window=blocks - 1)
    return CriterionResult(verdict.status, verdict.value + (verdict.tail if verdict.finite else 0.0),
                           terms)


def local_criterion(mu: AtomicMeasure, x: float, g: Gauge) -> CriterionResult:
    """int_0^1 eps / (lambda(eps) mu(x, eps)) d eps.

    mu(x, eps) is the mass of the closed arc of length 2 eps centred at x.
    For an atomic measure it is a step function of eps, so the integral is
    an exact sum over the steps.
    """
    if not len(mu):
        return CriterionResult(DIVERGES, math.inf)
    d = circular_distance(mu.positions, wrap(x))
    order = np.argsort(d, kind="stable")
    d, m = d[order], mu.masses[order]
    if d[0] > 0:
        return CriterionResult(DIVERGES, math.inf)
    uniq, start = np.unique(d, return_index=True)
    cum = np.cumsum(m)
    ends = np.append(start[1:], m.size) - 1
    mass_at = cum[ends]
    uppers = np.append(uniq[1:], 1.0)
    pieces = [g.eps_over_lambda_integral(a, b) / M for a, b, M in zip(uniq, uppers, mass_at)]
    return CriterionResult(CONVERGES, math.fsum(pieces), pieces)
