"""Heavy/light corona decomposition, BC-set extraction and sublevel area integrals.

Dyadic arcs are half-open [k 2^-n, (k+1) 2^-n) when masses are taken, so an
atom belongs to exactly one arc of each generation. Heavy arcs have average
density mu(I)/|I| >= M, light arcs <= M/divisor (divisor 100 by default);
inside every heavy arc the maximal light subarcs are found, inside every
light arc the maximal heavy subarcs, and so on down to a generation cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special

from .circle import GENERATION_CAP, AtomicMeasure, ClosedSet
from .errors import RangeError
from .inner import geometric_tail, poisson_polar, top_box_harnack
from .numerics import CONVERGES, DIVERGES, INCONCLUSIVE, classify_from_peak

HEAVY, LIGHT, UNRESOLVED = "heavy", "light", "unresolved"
# inf over generations and atom positions in I of P(z_I) |I| / mu(I), with
# z_I = (1 - 3|I|/4) exp(2 pi i mid(I)); attained as |I| -> 0, atom at an end
CENTER_FLOOR = 1.5 / (9.0 / 16.0 + math.pi ** 2)

_SEARCH_HEAVY, _SEARCH_LIGHT = 0, 1


@dataclass
class CoronaDecomposition:
    """Flat forest: node i is the dyadic arc (gen[i], idx[i]).

    ``parent`` points to the node whose search produced it (-1 at the top);
    unresolved arcs are those still undecided at the cap, owned by the node
    whose search reached them. ``tree_counts[i][n]`` counts the dyadic arcs of
    generation n inside heavy node i that are not inside one of its light
    children (including i itself).
    """

    M: float
    divisor: float
    depth: int
    gen: np.ndarray
    idx: np.ndarray
    kind: list
    parent: np.ndarray
    level: np.ndarray
    mass: np.ndarray
    tree_counts: dict = field(default_factory=dict, repr=False)
    mu: Optional[AtomicMeasure] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.kind)

    def nodes(self, kind: str) -> np.ndarray:
        return np.flatnonzero(np.array(self.kind, dtype=object) == kind) if self.kind \
            else np.zeros(0, dtype=int)

    def heavy(self) -> np.ndarray:
        return self.nodes(HEAVY)

    def light(self) -> np.ndarray:
        return self.nodes(LIGHT)

    def unresolved(self) -> np.ndarray:
        return self.nodes(UNRESOLVED)

    def children(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.parent == i)

    def arc(self, i: int) -> tuple[float, float]:
        L = math.ldexp(1.0, -int(self.gen[i]))
        return float(self.idx[i]) * L, L

    def ratio(self, i: int) -> float:
        return float(self.mass[i]) * math.ldexp(1.0, int(self.gen[i]))

    def summary(self) -> dict:
        return {"M": self.M, "divisor": self.divisor, "depth": self.depth,
                "heavy": int(self.heavy().size), "light": int(self.light().size),
                "unresolved": int(self.unresolved().size),
                "levels": int(self.level.max()) if len(self) else 0}

    def to_dict(self) -> dict:
        out = self.summary()
        out["nodes"] = [
            {"id": i, "kind": self.kind[i], "generation": int(self.gen[i]),
             "index": int(self.idx[i]), "parent": int(self.parent[i]),
             "level": int(self.level[i]), "mass": float(self.mass[i])}
            for i in range(len(self))]
        return out


def _arc_masses(x: np.ndarray, cum: np.ndarray, idx: np.ndarray, n: int) -> np.ndarray:
    left = np.ldexp(idx.astype(float), -n)
    right = np.ldexp((idx + 1).astype(float), -n)
    return cum[np.searchsorted(x, right, "left")] - cum[np.searchsorted(x, left, "left")]


def corona_decompose(mu: AtomicMeasure, M: float, depth: int = 24,
                     light_ratio_divisor: float = 100.0) -> CoronaDecomposition:
    """Alternating maximal heavy/light forest down to generation ``depth``."""
    if not M > 0:
        raise RangeError("M must be positive")
    if not light_ratio_divisor > 1:
        raise RangeError("light_ratio_divisor must exceed 1")
    if not (0 <= depth <= GENERATION_CAP):
        raise RangeError(f"depth must lie in [0, {GENERATION_CAP}]")
    x = mu.positions
    cum = np.concatenate([[0.0], np.cumsum(mu.masses)])
    low = M / light_ratio_divisor

    gens, idxs, kinds, parents, levels, masses = [], [], [], [], [], []
    tree: dict[int, np.ndarray] = {}

    def add(n, idx, kind, parent, level, mass):
        start = sum(len(a) for a in idxs)
        gens.append(np.full(idx.size, n))
        idxs.append(idx)
        kinds.extend([kind] * idx.size)
        parents.append(parent)
        levels.append(level)
        masses.append(mass)
        return np.arange(start, start + idx.size)

    node_level = []  # flat mirror of levels for owner lookups

    def level_of(ids):
        """Level of each owner node; 0 for the top (owner -1)."""
        lv = np.zeros(ids.size, dtype=int)
        ok = ids >= 0
        if ok.any():
            lv[ok] = np.asarray(node_level, dtype=int)[ids[ok]]
        return lv

    f_idx = np.array([0], dtype=np.int64)
    f_mode = np.array([_SEARCH_HEAVY])
    f_owner = np.array([-1])
    if not len(mu):
        f_idx = f_idx[:0]
        f_mode, f_owner = f_mode[:0], f_owner[:0]
    for n in range(depth + 1):
        if not f_idx.size:
            break
        m = _arc_masses(x, cum, f_idx, n)
        ratio = m * math.ldexp(1.0, n)
        at_cap = n == depth
        nxt_idx, nxt_mode, nxt_owner = [], [], []

        # searching for heavy arcs
        sh = f_mode == _SEARCH_HEAVY
        new_heavy = sh & (ratio >= M)
        if new_heavy.any():
            own = f_owner[new_heavy]
            lv = level_of(own) + 1
            ids = add(n, f_idx[new_heavy], HEAVY, own, lv, m[new_heavy])
            node_level.extend(lv.tolist())
            for i in ids:
                tree[int(i)] = np.zeros(depth + 1, dtype=np.int64)
                tree[int(i)][n] = 1
            if not at_cap:
                nxt_idx.append(np.concatenate([2 * f_idx[new_heavy], 2 * f_idx[new_heavy] + 1]))
                nxt_mode.append(np.full(2 * ids.size, _SEARCH_LIGHT))
                nxt_owner.append(np.concatenate([ids, ids]))
        go_on = sh & ~new_heavy & (m > 0)
        if go_on.any():
            if at_cap:
                own = f_owner[go_on]
                lv = level_of(own)
                add(n, f_idx[go_on], UNRESOLVED, own, lv, m[go_on])
                node_level.extend(lv.tolist())
            else:
                nxt_idx.append(np.concatenate([2 * f_idx[go_on], 2 * f_idx[go_on] + 1]))
                nxt_mode.append(np.full(2 * int(go_on.sum()), _SEARCH_HEAVY))
                nxt_owner.append(np.concatenate([f_owner[go_on], f_owner[go_on]]))

        # searching for light arcs inside heavy ones
        sl = f_mode == _SEARCH_LIGHT
        new_light = sl & (ratio <= low)
        if new_light.any():
            own = f_owner[new_light]
            lv = level_of(own)
            ids = add(n, f_idx[new_light], LIGHT, own, lv, m[new_light])
            node_level.extend(lv.tolist())
            carry = m[new_light] > 0
            if not at_cap and carry.any():
                k = f_idx[new_light][carry]
                nxt_idx.append(np.concatenate([2 * k, 2 * k + 1]))
                nxt_mode.append(np.full(2 * k.size, _SEARCH_HEAVY))
                nxt_owner.append(np.concatenate([ids[carry], ids[carry]]))
        dense = sl & ~new_light
        if dense.any():
            own = f_owner[dense]
            for o, c in zip(*np.unique(own, return_counts=True)):
                tree[int(o)][n] += c
            if at_cap:
                lv = level_of(own)
                add(n, f_idx[dense], UNRESOLVED, own, lv, m[dense])
                node_level.extend(lv.tolist())
            else:
                nxt_idx.append(np.concatenate([2 * f_idx[dense], 2 * f_idx[dense] + 1]))
                nxt_mode.append(np.full(2 * int(dense.sum()), _SEARCH_LIGHT))
                nxt_owner.append(np.concatenate([own, own]))
        if nxt_idx:
            f_idx = np.concatenate(nxt_idx)
            f_mode = np.concatenate(nxt_mode)
            f_owner = np.concatenate(nxt_owner)
        else:
            f_idx = f_idx[:0]

    cat = (lambda a, dt: np.concatenate(a).astype(dt) if a else np.zeros(0, dtype=dt))
    return CoronaDecomposition(M, light_ratio_divisor, depth, cat(gens, int), cat(idxs, np.int64),
                               kinds, cat(parents, int), cat(levels, int), cat(masses, float),
                               tree, mu)


# -- extraction ------------------------------------------------------------

@dataclass
class ExtractedSet:
    node: int
    E: ClosedSet
    generation: int
    level: int

    def to_dict(self) -> dict:
        return {"node": self.node, "generation": self.generation, "level": self.level,
                "gaps": int(self.E.gap_len.size), "residual": int(self.E.res_len.size),
                "residual_length": self.E.residual_length()}


def extract_bc_sets(d: CoronaDecomposition) -> list[ExtractedSet]:
    """For each heavy arc I: the closed set I minus its open light children.

    The complement of I is one gap, the light children are the others, and
    arcs left undecided at the cap are residual pieces.
    """
    out = []
    kinds = np.array(d.kind, dtype=object)
    for i in d.heavy():
        kids = np.flatnonzero(d.parent == i)
        lights = kids[kinds[kids] == LIGHT]
        unres = kids[kinds[kids] == UNRESOLVED]
        a, L = d.arc(int(i))
        gl = [np.ldexp(d.idx[lights].astype(float), -d.gen[lights])]
        gw = [np.ldexp(1.0, -d.gen[lights])]
        if L < 1.0:
            gl.append(np.array([a + L]))
            gw.append(np.array([1.0 - L]))
        rl = np.ldexp(d.idx[unres].astype(float), -d.gen[unres])
        rw = np.ldexp(1.0, -d.gen[unres])
        E = ClosedSet.from_arrays(np.concatenate(gl), np.concatenate(gw), rl, rw)
        out.append(ExtractedSet(int(i), E, int(d.gen[i]), int(d.level[i])))
    return out


def check_decomposition(d: CoronaDecomposition) -> dict:
    """Alternation, maximality, packing and mass coverage, checked node by node."""
    kinds = np.array(d.kind, dtype=object)
    M, low = d.M, d.M / d.divisor
    alternation = maximal = packing = True
    x = d.mu.positions if d.mu is not None else np.zeros(0)
    cum = np.concatenate([[0.0], np.cumsum(d.mu.masses)]) if d.mu is not None else np.zeros(1)
    for i in range(len(d)):
        p = d.parent[i]
        k = kinds[i]
        if k == UNRESOLVED:
            continue
        r = d.ratio(i)
        if k == HEAVY:
            alternation &= p < 0 or kinds[p] == LIGHT
            maximal &= r >= M
        else:
            alternation &= p >= 0 and kinds[p] == HEAVY
            maximal &= r <= low
        # every strict ancestor up to the parent node fails the threshold
        top = d.gen[p] if p >= 0 else -1
        n, j = int(d.gen[i]), int(d.idx[i])
        while n - 1 > top:
            n, j = n - 1, j >> 1
            ra = float(_arc_masses(x, cum, np.array([j]), n)[0]) * math.ldexp(1.0, n)
            maximal &= (ra < M) if k == HEAVY else (ra > low)
    for i in d.light():
        kids = d.children(int(i))
        kids = kids[kinds[kids] == HEAVY]
        if kids.size:
            packing &= math.fsum(np.ldexp(1.0, -d.gen[kids])) <= math.ldexp(1.0, -int(d.gen[i])) / d.divisor * (1 + 1e-12)
    # mass: heavy arcs minus light children, plus undecided arcs of heavy searches
    covered = 0.0
    for i in d.heavy():
        kids = d.children(int(i))
        covered += d.mass[i] - math.fsum(d.mass[kids[kinds[kids] == LIGHT]])
    top_unres = [i for i in d.unresolved() if d.parent[i] < 0 or kinds[d.parent[i]] == LIGHT]
    covered += math.fsum(d.mass[top_unres]) if top_unres else 0.0
    total = d.mu.total() if d.mu is not None else 0.0
    return {"alternation": bool(alternation), "maximality": bool(maximal),
            "packing": bool(packing), "covered_mass": covered, "total_mass": total,
            "coverage_ok": abs(covered - total) <= 1e-12 * max(total, 1.0)}


def light_density_check(d: CoronaDecomposition) -> dict:
    """Every dyadic arc inside a heavy arc that is not inside one of its light
    children has density > M/divisor. Such arcs are exactly the ones the light
    search had to split, so the check walks them again from the measure."""
    kinds = np.array(d.kind, dtype=object)
    low = d.M / d.divisor
    x = d.mu.positions
    cum = np.concatenate([[0.0], np.cumsum(d.mu.masses)])
    worst, checked = math.inf, 0
    for i in d.heavy():
        kids = d.children(int(i))
        lights = kids[kinds[kids] == LIGHT]
        n0, j0 = int(d.gen[i]), int(d.idx[i])
        frontier = np.array([j0], dtype=np.int64)
        lset = set(zip(d.gen[lights].tolist(), d.idx[lights].tolist()))
        for n in range(n0, d.depth + 1):
            if not frontier.size:
                break
            keep = np.array([(n, int(j)) not in lset for j in frontier], dtype=bool)
            frontier = frontier[keep]
            if not frontier.size:
                break
            r = _arc_masses(x, cum, frontier, n) * math.ldexp(1.0, n)
            checked += frontier.size
            worst = min(worst, float(r.min()))
            frontier = np.concatenate([2 * frontier, 2 * frontier + 1])
    return {"checked": int(checked), "min_ratio": worst, "threshold": low,
            "ok": bool(checked == 0 or worst > low)}


def tree_terms(d: CoronaDecomposition, beta: float = 1.0) -> list[float]:
    """Per generation: sum over heavy nodes of count * |I|^beta for the dyadic
    arcs inside the heavy arc and outside its light children."""
    out = np.zeros(d.depth + 1)
    for c in d.tree_counts.values():
        out += c
    return [float(c) * math.ldexp(1.0, -n) ** beta for n, c in enumerate(out)]


# -- sublevel area integral --------------------------------------------------

@dataclass
class AreaReport:
    value: float
    inner: float
    outer: Optional[float]
    status: str
    terms: list = field(repr=False)
    tail: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def diverging(self) -> bool:
        return self.status == DIVERGES

    def to_dict(self) -> dict:
        return {"value": self.value, "inner": self.inner, "outer": self.outer,
                "status": self.status, "tail": self.tail,
                "terms": [float(t) for t in self.terms], **self.meta}


def top_integral(n: int, sigma: float) -> float:
    """|I| * int_{|I|/2}^{|I|} t^-sigma dt for a generation-n top box."""
    L = math.ldexp(1.0, -n)
    if sigma == 1.0:
        return L * math.log(2.0)
    return L * (L ** (1.0 - sigma) - (0.5 * L) ** (1.0 - sigma)) / (1.0 - sigma)


def _far_bound(x, m, idx, n):
    """Upper bound for P_mu anywhere below the generation-n arcs idx, from
    the atoms at distance >= 1.5 |I| from the arc midpoints; also flags
    arcs with an atom closer than that."""
    L = math.ldexp(1.0, -n)
    mid = np.ldexp(idx.astype(float) + 0.5, -n)
    near = np.zeros(idx.size, dtype=bool)
    bound = np.zeros(idx.size)
    step = max(1, (1 << 21) // max(x.size, 1))
    for s in range(0, idx.size, step):
        d = np.abs((x[None, :] - mid[s:s + step, None] + 0.5) % 1.0 - 0.5)
        near[s:s + step] = (d < 1.5 * L).any(1)
        # below the arc: 1 - r^2 <= 2L, |zeta - z|^2 >= 16 r (d - L/2)^2, r >= 1 - L
        dd = np.maximum(d, 1.5 * L) - 0.5 * L
        bound[s:s + step] = (m[None, :] * 2.0 * L / ((1.0 - L) * 16.0 * dd * dd)).sum(1)
    return near, bound


# an atom is closed off once its neighbours add at most this fraction of the
# threshold around its horodisc
CLOSE_BG = 0.01


def horodisc_integral(m: float, threshold: float, T: float, sigma: float) -> float:
    """int_0^T width(t) t^-sigma dt over the region P > threshold of a lone
    atom of mass m, to leading order near the circle.

    There P = 2 m t / ((2 pi x)^2 + t^2), so the region is the horodisc
    (2 pi x)^2 + t^2 < a t, a = 2m/threshold, of width sqrt(a t - t^2)/pi
    (x in turns). With t = a s the integral is an incomplete beta function.
    """
    a = 2.0 * m / threshold
    if not (sigma < 1.5):
        raise RangeError("the horodisc integral needs sigma < 3/2")
    b1, b2 = 1.5 - sigma, 1.5
    x = min(T / a, 1.0)
    return a ** (2.0 - sigma) / math.pi * float(special.beta(b1, b2) * special.betainc(b1, b2, x))


def _nearest_gaps(x: np.ndarray) -> np.ndarray:
    if x.size == 1:
        return np.ones(1)
    d = np.diff(np.append(x, x[0] + 1.0))
    return np.minimum(d, np.roll(d, 1))


def _closable(x, m, d, open_, H, threshold):
    """Open atoms whose region below height H is a lone horodisc."""
    a = 2.0 * m / threshold
    w = np.sqrt(np.maximum(a * H - H * H, 0.0)) / (2.0 * math.pi)
    cand = np.flatnonzero(open_ & (w <= 0.25 * d) & (H <= 0.125 * d))
    ok = np.zeros(x.size, dtype=bool)
    step = max(1, (1 << 21) // max(x.size, 1))
    for s in range(0, cand.size, step):
        c = cand[s:s + step]
        dist = np.abs((x[None, :] - x[c, None] + 0.5) % 1.0 - 0.5)
        half = 0.5 * d[c, None]
        delta = np.maximum(dist - half, half)
        bg = m[None, :] * 2.0 * H / ((1.0 - H) * 16.0 * delta * delta)
        bg[np.arange(c.size), c] = 0.0
        ok[c] = bg.sum(1) <= CLOSE_BG * threshold
    return ok


# top boxes are often far bigger than the sublevel region they cut, so a box
# the Harnack bracket cannot settle is classified on a grid, finer while
# boxes are large
FINE_GEN = 10
SUB_FINE = 8
SUB_COARSE = 4


def _band(a: float, b: float, sigma: float) -> float:
    if sigma == 1.0:
        return math.log(b / a)
    return (b ** (1.0 - sigma) - a ** (1.0 - sigma)) / (1.0 - sigma)


def _subsampled(mu: AtomicMeasure, idx: np.ndarray, n: int, threshold: float,
                sigma: float) -> float:
    if not idx.size:
        return 0.0
    sub = SUB_FINE if n <= FINE_GEN else SUB_COARSE
    L = math.ldexp(1.0, -n)
    u = (np.arange(sub) + 0.5) / sub
    edges = 0.5 * L + 0.5 * L * np.arange(sub + 1) / sub
    rows = np.array([_band(a, b, sigma) for a, b in zip(edges[:-1], edges[1:])]) * (L / sub)
    th = np.ldexp(idx[:, None, None] + u[None, :, None], -n)
    t = 0.5 * (edges[:-1] + edges[1:])[None, None, :]
    th, t = np.broadcast_arrays(th, t)
    P = poisson_polar(mu, 1.0 - t.ravel(), np.mod(th.ravel(), 1.0)).reshape(th.shape)
    return float(np.sum((P > threshold) * rows[None, None, :]))


def sublevel_area_integral(mu: AtomicMeasure, threshold: float, sigma: float = 1.0,
                           depth: int = GENERATION_CAP, budget: float = 6e4,
                           bracket: bool = False, min_gen: int = 8,
                           stable_tol: float = 0.02) -> AreaReport:
    """int over {P_mu > threshold} of dA / (1 - |z|)^sigma by dyadic top boxes.

    The estimate counts the part of each top box (sampled on a grid) where
    the Poisson value exceeds the threshold; level c of |S_mu| corresponds
    to threshold log(1/c). The inner estimate uses threshold * kappa and, with ``bracket``, the outer one
    threshold / kappa, kappa being the Harnack constant of the box; those two
    are rigorous up to the truncation tail. Boxes are refined only where a
    descendant can still reach the (lowest) threshold.
    """
    if not threshold > 0:
        raise RangeError("threshold must be positive (level c < 1)")
    if not (1.0 <= sigma < 2.0):
        raise RangeError("need 1 <= sigma < 2")
    if not (0 <= depth <= GENERATION_CAP):
        raise RangeError(f"depth must lie in [0, {GENERATION_CAP}]")
    x, m = mu.positions, mu.masses
    d_near = _nearest_gaps(x) if x.size else x
    # a steady geometric decay only means something once boxes separate atoms
    resolved = int(math.ceil(-math.log2(max(d_near.min(), 1e-300)))) if x.size > 1 else 0
    open_ = np.ones(x.size, dtype=bool)
    terms, inner, outer = [], [], []
    frontier = np.array([0], dtype=np.int64) if len(mu) else np.zeros(0, dtype=np.int64)
    stopped = "depth"
    for n in range(depth + 1):
        if not frontier.size:
            stopped = "empty"
            break
        kap = top_box_harnack(n)
        L = math.ldexp(1.0, -n)
        P = poisson_polar(mu, np.full(frontier.size, 1.0 - 0.75 * L),
                          np.ldexp(frontier.astype(float) + 0.5, -n))
        w = top_integral(n, sigma)
        # Harnack settles most boxes from the centre value alone
        full = P > threshold * kap
        mixed = (P > threshold / kap) & ~full
        terms.append(int(np.count_nonzero(full)) * w
                     + _subsampled(mu, frontier[mixed], n, threshold, sigma))
        inner.append(int(np.count_nonzero(P > threshold * kap)) * w)
        if bracket:
            outer.append(int(np.count_nonzero(P > threshold / kap)) * w)
        if n == depth:
            break
        if n >= resolved and _steady(terms, min_gen, stable_tol) and (not bracket or _steady(outer, min_gen, stable_tol)):
            stopped = "steady"
            break
        H = 0.5 * L
        if n + 1 >= min_gen and open_.any():
            shut = _closable(x, m, d_near, open_, H, threshold)
            if shut.any():
                lo = [horodisc_integral(mm, threshold, H, sigma) for mm in m[shut]]
                terms[-1] += math.fsum(lo)
                inner[-1] += math.fsum(horodisc_integral(mm, threshold * kap, H, sigma)
                                       for mm in m[shut])
                if bracket:
                    outer[-1] += math.fsum(
                        horodisc_integral(mm, threshold / kap * (1.0 - CLOSE_BG), H, sigma)
                        for mm in m[shut])
                open_ &= ~shut
        kids = np.concatenate([2 * frontier, 2 * frontier + 1])
        if not open_.any():
            frontier = kids[:0]
            continue
        near, bound = _far_bound(x[open_], m[open_], kids, n + 1)
        floor = threshold / kap if bracket else threshold
        frontier = np.sort(kids[near | (bound >= floor)])
        if frontier.size > budget:
            stopped = "budget"
            break
    v = classify_from_peak(terms)
    tail, ratio = geometric_tail(terms)
    total = math.fsum(terms)
    if stopped == "empty" or (total == 0.0):
        status, value, tail = CONVERGES, total, 0.0
    elif v.status == DIVERGES or math.isinf(tail):
        status, value = DIVERGES, math.inf
    elif math.isnan(tail):
        status, value = INCONCLUSIVE, total
    else:
        status = CONVERGES if (v.status == CONVERGES or stopped == "steady") else v.status
        value = total + tail
    inner_v = math.fsum(inner) + (geometric_tail(inner)[0] if status == CONVERGES and
                                  np.isfinite(geometric_tail(inner)[0]) else 0.0)
    outer_v = None
    if bracket:
        ot, _ = geometric_tail(outer)
        outer_v = math.fsum(outer) + (ot if np.isfinite(ot) else math.inf)
    meta = {"threshold": threshold, "sigma": sigma, "stopped": stopped, "ratio": ratio,
            "partial": total, "generations": len(terms)}
    return AreaReport(value, inner_v, outer_v, status, terms,
                      tail if np.isfinite(tail) else math.inf, meta)


def _steady(terms: list, min_gen: int, tol: float) -> bool:
    """Last terms positive and decaying at a stable geometric rate."""
    if len(terms) < max(min_gen, 7):
        return False
    t = np.asarray(terms[-7:], dtype=float)
    if np.any(t <= 0):
        return False
    r2 = np.sqrt(t[2:] / t[:-2])
    return bool(np.all(r2 < 1.0) and np.ptp(r2) < tol)


def threshold_for_level(c: float) -> float:
    """|S_mu| < c  iff  P_mu > log(1/c)."""
    if not (0.0 < c < 1.0):
        raise RangeError("level must lie in (0, 1)")
    return math.log(1.0 / c)


def threshold_for_M(M: float, divisor: float = 100.0) -> float:
    """Poisson threshold met at the centre of every top box over an arc of
    density > M/divisor."""
    return CENTER_FLOOR * M / divisor
