"""Small numerical helpers shared by the norm and decomposition modules.

Everything here is deterministic. Sums are accumulated with ``math.fsum`` or
in a fixed order so that repeated runs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

CONVERGES = "converges"
DIVERGES = "diverges"
INCONCLUSIVE = "inconclusive"

# partial sums above this multiple of the first nonzero term count as divergent
BLOWUP_FACTOR = 1e6
# a second half-window at most this fraction of the first counts as decaying
DECAY_RATIO = 0.75
TIE_TOL = 1e-9


@dataclass(frozen=True)
class SeriesVerdict:
    """Classification of a truncated series of non-negative terms.

    ``value`` is the partial sum, ``tail`` a geometric tail estimate (``inf``
    when the series is judged divergent) and ``ratio`` the observed per-term
    decay factor used for the estimate.
    """

    status: str
    value: float
    tail: float
    ratio: float
    terms: tuple = field(default=(), repr=False)

    @property
    def diverging(self) -> bool:
        return self.status == DIVERGES

    @property
    def finite(self) -> bool:
        return self.status == CONVERGES

    @property
    def estimate(self) -> float:
        return self.value + self.tail


def classify_series(terms: Sequence[float], window: int = 10) -> SeriesVerdict:
    """Decide whether a series of non-negative scale terms converges.

    The last ``window`` terms are split into two halves. If the later half
    carries at least as much as the earlier one the series keeps growing and
    is flagged divergent; if it carries at most ``DECAY_RATIO`` of it the
    series is decaying and a geometric tail is attached. Partial sums beyond
    ``BLOWUP_FACTOR`` times the first nonzero term are divergent outright.
    Comparing half-window sums rather than single terms smooths out the
    period-two wobble that dyadic binning of self-similar sets produces.
    """
    t = np.asarray(terms, dtype=float)
    if t.size == 0:
        return SeriesVerdict(CONVERGES, 0.0, 0.0, 0.0, ())
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        if np.any(np.isposinf(t)):
            return SeriesVerdict(DIVERGES, math.inf, math.inf, math.inf, tuple(t))
        raise ValueError("series terms must be finite and non-negative")
    value = math.fsum(t)
    nz = np.flatnonzero(t)
    if nz.size == 0:
        return SeriesVerdict(CONVERGES, 0.0, 0.0, 0.0, tuple(t))
    if value > BLOWUP_FACTOR * t[nz[0]]:
        return SeriesVerdict(DIVERGES, value, math.inf, math.inf, tuple(t))
    w = min(window, t.size)
    w -= w % 2
    if w < 2:
        return SeriesVerdict(INCONCLUSIVE, value, math.nan, math.nan, tuple(t))
    h = w // 2
    first = math.fsum(t[-w:-h])
    second = math.fsum(t[-h:])
    if second == 0.0:
        return SeriesVerdict(CONVERGES, value, 0.0, 0.0, tuple(t))
    # equal halves (a log-log divergence on doubling blocks) may differ by rounding
    if first == 0.0 or second >= first * (1.0 - TIE_TOL):
        return SeriesVerdict(DIVERGES, value, math.inf, math.inf, tuple(t))
    q = second / first
    ratio = q ** (1.0 / h)
    if q <= DECAY_RATIO:
        tail = t[-1] * ratio / (1.0 - ratio)
        return SeriesVerdict(CONVERGES, value, tail, ratio, tuple(t))
    return SeriesVerdict(INCONCLUSIVE, value, math.nan, ratio, tuple(t))



def classify_from_peak(terms: list, window: int = 8):
    """classify_series on the terms from the largest one on; the value is
    still the sum of all terms.

    Leading terms many orders of magnitude below the bulk (coarse boxes far
    from every atom, say) would otherwise trip the blow-up rule.
    """
    t = list(terms)
    if not t:
        return classify_series(t)
    v = classify_series(t[int(np.argmax(t)):], window=min(window, max(len(t), 2)))
    total = math.fsum(t)
    return SeriesVerdict(v.status, total, v.tail, v.ratio, tuple(t))


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with absolute tolerance ``tol``."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (rec(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2.0, depth - 1))

    return rec(a, b, fa, fm, fb, whole, tol, max_depth)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = ((x + 1.0) / 2.0, w / 2.0)
    return _GL_CACHE[order]


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def pairwise_sum(values) -> float:
    """Order-independent accurate sum; used wherever reproducibility matters."""
    return math.fsum(np.asarray(values, dtype=float).ravel())
