"""Arcs, dyadic arcs, atomic measures and closed sets on the unit circle.

The circle is normalized to total length 1: a position is a fraction of a
full turn in [0, 1). Arcs are half-open, ``[left, left + length)``, and may
wrap through 0. An atom sitting exactly on a dyadic boundary therefore
belongs to the arc on its right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, RangeError

GENERATION_CAP = 48
LENGTH_TOL = 1e-12


def wrap(x):
    """Reduce positions to [0, 1). Works on scalars and arrays."""
    y = np.mod(x, 1.0)
    # tiny negatives round up to exactly 1.0 under mod
    y = np.where(y >= 1.0, 0.0, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def circular_distance(x, y):
    """Shortest distance between positions, in turns (at most 1/2)."""
    d = np.mod(np.asarray(x) - np.asarray(y), 1.0)
    return np.minimum(d, 1.0 - d)


def check_generation(n: int) -> int:
    if n < 0 or n > GENERATION_CAP:
        raise RangeError(f"generation {n} outside [0, {GENERATION_CAP}]")
    return int(n)


@dataclass(frozen=True)
class Arc:
    left: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= 1.0):
            raise RangeError(f"arc length {self.length} outside (0, 1]")
        object.__setattr__(self, "left", wrap(self.left))

    @property
    def right(self) -> float:
        return self.left + self.length

    @property
    def midpoint(self) -> float:
        return wrap(self.left + 0.5 * self.length)

    def contains(self, x):
        off = np.mod(np.asarray(x, dtype=float) - self.left, 1.0)
        return off < self.length

    def middle_half(self) -> "Arc":
        return Arc(self.left + 0.25 * self.length, 0.5 * self.length)


@dataclass(frozen=True, order=True)
class DyadicArc:
    generation: int
    index: int

    def __post_init__(self):
        check_generation(self.generation)
        if not (0 <= self.index < (1 << self.generation)):
            raise RangeError(f"index {self.index} outside generation {self.generation}")

    @property
    def length(self) -> float:
        return math.ldexp(1.0, -self.generation)

    @property
    def left(self) -> float:
        return math.ldexp(float(self.index), -self.generation)

    @property
    def arc(self) -> Arc:
        return Arc(self.left, self.length)

    def children(self) -> tuple["DyadicArc", "DyadicArc"]:
        n, k = self.generation + 1, 2 * self.index
        return DyadicArc(n, k), DyadicArc(n, k + 1)

    def parent(self) -> "DyadicArc":
        if self.generation == 0:
            raise RangeError("the full circle has no parent")
        return DyadicArc(self.generation - 1, self.index // 2)

    def contains_arc(self, other: "DyadicArc") -> bool:
        if other.generation < self.generation:
            return False
        return other.index >> (other.generation - self.generation) == self.index

    @staticmethod
    def of_point(x: float, n: int) -> "DyadicArc":
        check_generation(n)
        return DyadicArc(n, int(math.floor(math.ldexp(wrap(x), n))))


def _as_array(x) -> np.ndarray:
    if not isinstance(x, (np.ndarray, list, tuple)):
        x = list(x)
    return np.atleast_1d(np.asarray(x, dtype=float))


def dyadic_index(x, n: int):
    """Generation-n dyadic index of each position; exact for n <= 52."""
    return np.floor(np.ldexp(np.asarray(x, dtype=float), n)).astype(np.int64)


class AtomicMeasure:
    """A finite positive measure given as weighted atoms.

    Positions are wrapped into [0, 1), sorted, and duplicates merged by
    adding their masses, so equal measures compare equal. Zero masses are
    dropped.
    """

    __slots__ = ("positions", "masses", "_cum")

    def __init__(self, positions: Iterable[float] = (), masses: Iterable[float] = ()):
        pos, m = _as_array(positions), _as_array(masses)
        if pos.shape != m.shape:
            raise RangeError("positions and masses differ in length")
        if pos.size and (not np.all(np.isfinite(pos)) or not np.all(np.isfinite(m))):
            raise RangeError("non-finite atom")
        if np.any(m < 0):
            raise RangeError("atom masses must be non-negative")
        keep = m > 0
        pos, m = np.atleast_1d(wrap(pos[keep])), m[keep]
        if pos.size:
            uniq, inv = np.unique(pos, return_inverse=True)
            m = np.bincount(inv, weights=m, minlength=uniq.size)
            pos = uniq
        self.positions = pos
        self.masses = m
        self.positions.setflags(write=False)
        self.masses.setflags(write=False)
        self._cum = None

    @classmethod
    def empty(cls) -> "AtomicMeasure":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def point(cls, x: float, mass: float = 1.0) -> "AtomicMeasure":
        return cls([x], [mass])

    def __len__(self) -> int:
        return int(self.positions.size)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AtomicMeasure)
                and np.array_equal(self.positions, other.positions)
                and np.array_equal(self.masses, other.masses))

    def __repr__(self) -> str:
        return f"AtomicMeasure(atoms={len(self)}, total={self.total():.6g})"

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return AtomicMeasure(np.concatenate([self.positions, other.positions]),
                             np.concatenate([self.masses, other.masses]))

    def scaled(self, c: float) -> "AtomicMeasure":
        if c < 0:
            raise RangeError("scale factor must be non-negative")
        return AtomicMeasure(self.positions, self.masses * c)

    def total(self) -> float:
        return math.fsum(self.masses)

    def _prefix(self) -> np.ndarray:
        if self._cum is None:
            self._cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        return self._cum

    def _mass_between(self, a: float, b: float) -> float:
        # half-open [a, b) with 0 <= a <= b <= 1
        cum = self._prefix()
        i = np.searchsorted(self.positions, a, side="left")
        j = np.searchsorted(self.positions, b, side="left")
        if j - i < 64:
            return math.fsum(self.masses[i:j])
        return float(cum[j] - cum[i])

    def mass_of(self, arc: Arc) -> float:
        if not len(self):
            return 0.0
        if arc.length >= 1.0:
            return self.total()
        a, b = arc.left, arc.left + arc.length
        if b <= 1.0:
            return self._mass_between(a, b)
        return self._mass_between(a, 1.0) + self._mass_between(0.0, b - 1.0)

    def mass_of_closed(self, a: float, b: float) -> float:
        """Mass of the closed arc from ``a`` to ``b`` (b - a in [0, 1])."""
        if not len(self):
            return 0.0
        if b - a >= 1.0:
            return self.total()
        off = np.mod(self.positions - a, 1.0)
        off = np.where(off >= 1.0, 0.0, off)
        return math.fsum(self.masses[off <= (b - a)])

    def dyadic_masses(self, n: int) -> np.ndarray:
        """Masses of all 2^n generation-n arcs (n <= 26)."""
        check_generation(n)
        if n > 26:
            raise RangeError("dense dyadic mass vectors are limited to generation 26")
        idx = dyadic_index(self.positions, n)
        return np.bincount(idx, weights=self.masses, minlength=1 << n)

    def restrict(self, arc: Arc, c: float = 1.0) -> "AtomicMeasure":
        if c < 0:
            raise RangeError("scale factor must be non-negative")
        inside = arc.contains(self.positions)
        return AtomicMeasure(self.positions[inside], self.masses[inside] * c)

    def support(self) -> "ClosedSet":
        if not len(self):
            raise RangeError("the zero measure has empty support")
        return ClosedSet.from_points(self.positions)


def measure_of_arc(mu: AtomicMeasure, arc: Arc) -> float:
    return mu.mass_of(arc)


def restrict_and_scale(mu: AtomicMeasure, arc: Arc, c: float) -> AtomicMeasure:
    return mu.restrict(arc, c)


# gap endpoints built by different sums of the same arc lengths can disagree
# by a few ulps; points that close to an endpoint count as endpoints
ENDPOINT_TOL = 4e-16


class ClosedSet:
    """A closed subset E of the circle.

    ``gaps`` are pairwise disjoint open complementary arcs. ``residual`` arcs
    are closed pieces of E that have not been subdivided further, as in a
    finite-generation Cantor approximation. Gaps and residual arcs together
    tile the circle; E is the complement of the open gaps. Both are stored as
    ``(left, length)`` arrays sorted by left endpoint.
    """

    __slots__ = ("gap_left", "gap_len", "res_left", "res_len")

    def __init__(self, gaps: Sequence[tuple[float, float]] = (),
                 residual: Sequence[tuple[float, float]] = (), check: bool = True):
        g = np.asarray(gaps, dtype=float).reshape(-1, 2)
        r = np.asarray(residual, dtype=float).reshape(-1, 2)
        g = g[np.argsort(wrap(g[:, 0]), kind="stable")] if len(g) else g
        r = r[np.argsort(wrap(r[:, 0]), kind="stable")] if len(r) else r
        self.gap_left = np.atleast_1d(wrap(g[:, 0])) if len(g) else np.empty(0)
        self.gap_len = g[:, 1].copy() if len(g) else np.empty(0)
        self.res_left = np.atleast_1d(wrap(r[:, 0])) if len(r) else np.empty(0)
        self.res_len = r[:, 1].copy() if len(r) else np.empty(0)
        if check:
            self.validate()

    @classmethod
    def from_arrays(cls, gap_left, gap_len, res_left=(), res_len=(), check=True) -> "ClosedSet":
        g = np.column_stack([np.asarray(gap_left, float), np.asarray(gap_len, float)]) if len(gap_len) else ()
        r = np.column_stack([np.asarray(res_left, float), np.asarray(res_len, float)]) if len(res_len) else ()
        return cls(g, r, check=check)

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "ClosedSet":
        pts = np.unique(wrap(_as_array(points)))
        if pts.size == 0:
            raise RangeError("a closed set needs at least one point")
        nxt = np.roll(pts, -1)
        lengths = np.mod(nxt - pts, 1.0)
        if pts.size == 1:
            lengths = np.array([1.0])
        return cls.from_arrays(pts, lengths)

    @classmethod
    def full_circle(cls) -> "ClosedSet":
        return cls((), [(0.0, 1.0)])

    def validate(self) -> None:
        if np.any(self.gap_len <= 0) or np.any(self.gap_len > 1) or np.any(self.res_len <= 0):
            raise RangeError("gap and residual lengths must lie in (0, 1]")
        total = math.fsum(self.gap_len) + math.fsum(self.res_len)
        if abs(total - 1.0) > 1e-9:
            raise RangeError(f"gaps and residual arcs cover length {total}, not 1")
        lefts = np.concatenate([self.gap_left, self.res_left])
        lens = np.concatenate([self.gap_len, self.res_len])
        if lefts.size > 1:
            order = np.argsort(lefts, kind="stable")
            lefts, lens = lefts[order], lens[order]
            ends = lefts + lens
            nxt = np.concatenate([lefts[1:], [lefts[0] + 1.0]])
            if np.any(ends - nxt > 1e-9):
                raise RangeError("gaps and residual arcs overlap")

    def __repr__(self) -> str:
        return f"ClosedSet(gaps={self.gap_len.size}, residual={self.res_len.size})"

    @property
    def gaps(self) -> list[Arc]:
        return [Arc(a, l) for a, l in zip(self.gap_left, self.gap_len)]

    @property
    def residual(self) -> list[Arc]:
        return [Arc(a, l) for a, l in zip(self.res_left, self.res_len)]

    def residual_length(self) -> float:
        return math.fsum(self.res_len)

    def is_zero_length(self) -> bool:
        return self.res_len.size == 0

    def max_residual(self) -> float:
        return float(self.res_len.max()) if self.res_len.size else 0.0

    def contains(self, x):
        """Membership in E, i.e. not inside any open gap."""
        x = np.atleast_1d(wrap(np.asarray(x, dtype=float)))
        inside = np.zeros(x.shape, dtype=bool)
        if self.gap_len.size == 0:
            return ~inside
        # candidate gap: the last one starting strictly before x (cyclically)
        idx = np.searchsorted(self.gap_left, x, side="left") - 1
        for cand in (idx, np.full_like(idx, self.gap_len.size - 1)):
            c = np.mod(cand, self.gap_len.size)
            off = np.mod(x - self.gap_left[c], 1.0)
            inside |= (off > ENDPOINT_TOL) & (off < self.gap_len[c] - ENDPOINT_TOL)
        return ~inside

    def _interior_index_range(self, n: int):
        scale = math.ldexp(1.0, n)
        lo = np.floor(self.gap_left * scale).astype(np.int64) + 1
        hi = np.ceil((self.gap_left + self.gap_len) * scale).astype(np.int64) - 2
        return lo, hi

    def count_meeting(self, n: int) -> int:
        """Number of generation-n dyadic arcs whose closure meets E."""
        check_generation(n)
        total = 1 << n
        if self.gap_len.size == 0:
            return total
        lo, hi = self._interior_index_range(n)
        inside = np.maximum(hi - lo + 1, 0)
        return int(total - inside.sum())

    def dyadic_meeting_indices(self, n: int) -> np.ndarray:
        check_generation(n)
        if n > 24:
            raise RangeError("explicit enumeration is limited to generation 24")
        total = 1 << n
        if self.gap_len.size == 0:
            return np.arange(total)
        lo, hi = self._interior_index_range(n)
        keep = hi >= lo
        diff = np.zeros(2 * total + 2, dtype=np.int64)
        np.add.at(diff, lo[keep], 1)
        np.add.at(diff, hi[keep] + 1, -1)
        covered = np.cumsum(diff)[: 2 * total]
        covered = covered[:total] + covered[total:]
        return np.flatnonzero(covered == 0)


def dyadic_arcs_meeting(E: ClosedSet, n: int) -> list[DyadicArc]:
    return [DyadicArc(n, int(k)) for k in E.dyadic_meeting_indices(n)]


@dataclass(frozen=True)
class WhitneyArc:
    arc: Arc
    level: int
    remainder: bool = False


def whitney_decompose(J: Arc, depth: int = 40, min_length: float = 1e-300) -> list[WhitneyArc]:
    """Tile J by arcs whose length is comparable to their distance to the ends.

    The central piece is the middle half of J. Level k >= 1 contributes one
    arc of length |J|/2^(k+2) on each side, at the same distance from the
    nearest endpoint. The two pieces of length |J|/2^(depth+1) touching the
    endpoints are returned with ``remainder=True``.
    """
    if depth < 0:
        raise RangeError("depth must be non-negative")
    if J.length >= 1.0 and depth > 0:
        raise RangeError("whitney decomposition needs a proper sub-arc")
    if J.length < min_length:
        raise RangeError("arc below the minimum resolution")
    if depth == 0:
        return [WhitneyArc(J, 0)]
    L, a = J.length, J.left
    out = [WhitneyArc(Arc(a + L / 4, L / 2), 0)]
    for k in range(1, depth):
        ell = math.ldexp(L, -(k + 2))
        out.append(WhitneyArc(Arc(a + ell, ell), k))
        out.append(WhitneyArc(Arc(a + L - 2 * ell, ell), k))
    edge = math.ldexp(L, -(depth + 1))
    out.append(WhitneyArc(Arc(a, edge), depth, True))
    out.append(WhitneyArc(Arc(a + L - edge, edge), depth, True))
    return out


# -- text formats ---------------------------------------------------------

MEASURE_HEADER = "# atomic-measure v1"
SET_HEADER = "# closed-set v1"


def format_measure(mu: AtomicMeasure) -> str:
    lines = [MEASURE_HEADER]
    lines += [f"{x!r} {m!r}" for x, m in zip(mu.positions.tolist(), mu.masses.tolist())]
    return "\n".join(lines) + "\n"


def _data_lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line


def parse_measure(text: str) -> AtomicMeasure:
    first = next((l.strip() for l in text.splitlines() if l.strip()), "")
    if first != MEASURE_HEADER:
        raise ParseError(f"expected header {MEASURE_HEADER!r}")
    pos, mass = [], []
    for no, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {no}: expected 'position mass'")
        try:
            x, m = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {no}: {exc}") from None
        if not (math.isfinite(x) and math.isfinite(m)) or m < 0:
            raise ParseError(f"line {no}: invalid atom")
        pos.append(x)
        mass.append(m)
    return AtomicMeasure(pos, mass)


def format_closed_set(E: ClosedSet) -> str:
    lines = [SET_HEADER]
    lines += [f"gap {a!r} {l!r}" for a, l in zip(E.gap_left.tolist(), E.gap_len.tolist())]
    lines += [f"residual {a!r} {l!r}" for a, l in zip(E.res_left.tolist(), E.res_len.tolist())]
    return "\n".join(lines) + "\n"


def parse_closed_set(text: str) -> ClosedSet:
    gaps, res = [], []
    for no, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("gap", "residual"):
            raise ParseError(f"line {no}: expected 'gap|residual left length'")
        try:
            a, l = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ParseError(f"line {no}: {exc}") from None
        (gaps if parts[0] == "gap" else res).append((a, l))
    if not gaps and not res:
        raise ParseError("closed set has no lines")
    try:
        return ClosedSet(gaps, res)
    except RangeError as exc:
        raise ParseError(str(exc)) from None
