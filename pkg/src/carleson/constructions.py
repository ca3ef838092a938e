"""Generators for the concrete sets and measures used in the experiments.

* symmetric Cantor sets with ratio A and their equal-splitting measures
* the pruned Cantor set whose gap census is throttled to
  N_j <= j^-a * 2^(j (1-2p)/(1-p)), carrying endpoint atoms of mass
  |J|^((1-2p)/(1-p))
* n equally spaced atoms of mass n^-(2-eps)
* disjoint rescaled copies of given measures
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circle import Arc, AtomicMeasure, ClosedSet
from .errors import RangeError

MAX_CANTOR_GENERATIONS = 30


@dataclass(frozen=True)
class Pruning:
    p: float
    alpha_exp: float

    def __post_init__(self):
        if not (0.0 < self.p < 0.5):
            raise RangeError("pruning needs 0 < p < 1/2")
        if not (1.0 < self.alpha_exp < 1.0 + self.p):
            raise RangeError("pruning needs 1 < alpha_exp < 1 + p")

    @property
    def exponent(self) -> float:
        """(1 - 2p) / (1 - p), the reciprocal of log2 A."""
        return (1.0 - 2.0 * self.p) / (1.0 - self.p)

    @property
    def ratio(self) -> float:
        return 2.0 ** (1.0 / self.exponent)

    def bound(self, j: float) -> float:
        return j ** (-self.alpha_exp) * 2.0 ** (self.exponent * j)


@dataclass(frozen=True)
class CantorSpec:
    A: float
    G: int
    pruning: Optional[Pruning] = None

    def __post_init__(self):
        if not self.A > 2.0:
            raise RangeError("Cantor ratio must exceed 2")
        if not (0 <= self.G <= MAX_CANTOR_GENERATIONS):
            raise RangeError(f"generations must lie in [0, {MAX_CANTOR_GENERATIONS}]")


def _gaps_between(lefts: np.ndarray, length: float) -> ClosedSet:
    """ClosedSet whose residual is the given equal-length arcs."""
    lefts = np.sort(lefts)
    nxt = np.append(lefts[1:], lefts[0] + 1.0)
    gl = nxt - (lefts + length)
    keep = gl > 0
    return ClosedSet.from_arrays((lefts + length)[keep], gl[keep], lefts,
                                 np.full(lefts.size, length))


def cantor_arcs(A: float, G: int) -> tuple[np.ndarray, float, list]:
    """Left endpoints and common length of the 2^G defining arcs, plus the gaps.

    The gaps are returned as a list of (generation, lefts, length).
    """
    arcs = np.array([0.0])
    L = 1.0
    gaps = []
    for n in range(1, G + 1):
        gaps.append((n, arcs + L / A, L * (1.0 - 2.0 / A)))
        arcs = np.sort(np.concatenate([arcs, arcs + L - L / A]))
        L /= A
    return arcs, L, gaps


def cantor_set(spec: CantorSpec) -> tuple[ClosedSet, dict]:
    """Symmetric Cantor set to generation G and its per-generation gap census."""
    if spec.pruning is not None:
        pc = pruned_cantor(spec.pruning.p, spec.pruning.alpha_exp, spec.G)
        return pc.E, pc.census
    if spec.G == 0:
        return ClosedSet.full_circle(), {}
    arcs, L, gaps = cantor_arcs(spec.A, spec.G)
    gl = np.concatenate([g[1] for g in gaps])
    glen = np.concatenate([np.full(g[1].size, g[2]) for g in gaps])
    E = ClosedSet.from_arrays(gl, glen, arcs, np.full(arcs.size, L))
    census = {n: int(lefts.size) for n, lefts, _ in gaps}
    return E, census


def cantor_measure(spec: CantorSpec) -> AtomicMeasure:
    """2^G atoms of mass 2^-G at the left ends of the generation-G arcs."""
    arcs, _, _ = cantor_arcs(spec.A, spec.G)
    return AtomicMeasure(arcs, np.full(arcs.size, math.ldexp(1.0, -spec.G)))


def cantor_cdf(x, A: float, depth: int = 60):
    """Distribution function of the limiting Cantor measure on [0, 1].

    Used as an exact oracle for arc masses of the infinite construction.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    scale = 1.0
    y = x.copy()
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(depth):
        scale *= 0.5
        left = y <= 1.0 / A
        right = y >= 1.0 - 1.0 / A
        mid = ~left & ~right & ~done
        out = np.where(mid, out + scale, out)
        done |= mid
        out = np.where(right & ~done, out + scale, out)
        y = np.where(left, y * A, np.where(right, (y - (1.0 - 1.0 / A)) * A, y))
    return out if out.ndim else float(out)


@dataclass
class PrunedCantor:
    E: ClosedSet
    mu: AtomicMeasure
    census: dict
    bounds: dict
    scales: dict
    bad_generations: list
    A: float
    beta: float
    pruning: Pruning
    gap_generation: np.ndarray = field(repr=False)


def pruned_cantor(p: float, alpha_exp: float, G: int) -> PrunedCantor:
    """Cantor construction whose gap count is throttled generation by generation.

    At generation n every current arc would normally spawn one gap of length
    l_n = A^-(n-1) (1 - 2/A), i.e. at dyadic scale j_n = log2(1/l_n). If the
    number of arcs exceeds the budget j_n^-a * 2^(j_n (1-2p)/(1-p)) the
    generation is bad: every arc keeps only its left child and the cut-off
    right part joins the neighbouring gap. The resulting set carries atoms of
    mass |J|^((1-2p)/(1-p)) at both endpoints of every complementary arc J.

    ``beta`` is the dilation factor A/(A-2) that makes beta*J the defining arc
    a gap was cut from.
    """
    pr = Pruning(p, alpha_exp)
    if not (0 <= G <= MAX_CANTOR_GENERATIONS):
        raise RangeError(f"generations must lie in [0, {MAX_CANTOR_GENERATIONS}]")
    A = pr.ratio
    arcs = np.array([0.0])
    L = 1.0
    census, bounds, scales, bad = {}, {}, {}, []
    created_left, created_gen = [], []
    for n in range(1, G + 1):
        ell = L * (1.0 - 2.0 / A)
        j = math.log2(1.0 / ell)
        b = pr.bound(j)
        bounds[n], scales[n] = b, j
        if arcs.size > b:
            bad.append(n)
            census[n] = 0
        else:
            census[n] = int(arcs.size)
            created_left.append(arcs + L / A)
            created_gen.append(np.full(arcs.size, n))
            arcs = np.sort(np.concatenate([arcs, arcs + L - L / A]))
        L /= A
    E = _gaps_between(arcs, L) if G > 0 else ClosedSet.full_circle()
    # creation generation of each final gap: the gap containing a created left end
    gen_of_gap = np.zeros(E.gap_len.size, dtype=int)
    if created_left and E.gap_len.size:
        cl = np.concatenate(created_left)
        cg = np.concatenate(created_gen)
        idx = np.searchsorted(E.gap_left, cl, side="right") - 1
        idx = np.mod(idx, E.gap_len.size)
        gen_of_gap[idx] = cg
    if E.gap_len.size:
        s = pr.exponent
        w = E.gap_len ** s
        pos = np.concatenate([E.gap_left, E.gap_left + E.gap_len])
        mass = np.concatenate([w, w])
        mu = AtomicMeasure(pos, mass)
    else:
        mu = AtomicMeasure.empty()
    return PrunedCantor(E, mu, census, bounds, scales, bad, A, A / (A - 2.0), pr, gen_of_gap)


def equally_spaced_atoms(n: int, eps: float) -> AtomicMeasure:
    if n < 1:
        raise RangeError("need at least one atom")
    if not (0.0 < eps < 1.0):
        raise RangeError("need 0 < eps < 1")
    return AtomicMeasure(np.arange(n) / n, np.full(n, float(n) ** -(2.0 - eps)))


def independent_copies(measures: Sequence[AtomicMeasure], arcs: Sequence[Arc],
                       weights: Optional[Sequence[float]] = None) -> AtomicMeasure:
    """Place each measure into its target arc by the affine map [0,1) -> arc."""
    if len(measures) != len(arcs):
        raise RangeError("one target arc per measure")
    weights = [1.0] * len(measures) if weights is None else list(weights)
    if len(weights) != len(measures) or any(w < 0 for w in weights):
        raise RangeError("one non-negative weight per measure")
    total = math.fsum(a.length for a in arcs)
    if total > 1.0 + 1e-12:
        raise RangeError("target arcs overlap")
    order = sorted(range(len(arcs)), key=lambda i: arcs[i].left)
    for a, b in zip(order, order[1:] + order[:1]):
        if len(arcs) > 1 and np.mod(arcs[b].left - arcs[a].left, 1.0) < arcs[a].length - 1e-15:
            raise RangeError("target arcs overlap")
    pos, mass = [], []
    for mu, arc, w in zip(measures, arcs, weights):
        pos.append(arc.left + mu.positions * arc.length)
        mass.append(mu.masses * w)
    if not pos:
        return AtomicMeasure.empty()
    return AtomicMeasure(np.concatenate(pos), np.concatenate(mass))


@dataclass
class PrunedSums:
    generations: list
    scales: list  # dyadic scale j of each generation's gaps
    mass_terms: list  # sum of |J|^((1-2p)/(1-p)) over gaps made at generation n
    c1_terms: list  # sum of mu(beta J)^p |J|^(1-2p) over the same gaps

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def pruned_sums(pc: PrunedCantor) -> PrunedSums:
    """Per-generation terms of the total-mass series and of the hp-type test
    series sum_J mu(beta J)^p |J|^(1-2p) on a pruned Cantor set.

    beta J is the concentric dilation of J by ``pc.beta``. Bad generations
    create no gaps and are skipped.
    """
    p, s = pc.pruning.p, pc.pruning.exponent
    E, mu = pc.E, pc.mu
    gens, js, mt, ct = [], [], [], []
    for n in sorted(pc.census):
        sel = pc.gap_generation == n
        if not sel.any():
            continue
        L = E.gap_len[sel]
        mid = E.gap_left[sel] + 0.5 * L
        half = 0.5 * pc.beta * L
        cdf = np.cumsum(mu.masses)
        x = mu.positions

        def below(t):
            # mass of atoms in [0, t) with t allowed outside [0, 1)
            k = np.floor(t)
            i = np.searchsorted(x, t - k, side="left")
            return k * cdf[-1] + np.where(i > 0, cdf[np.maximum(i - 1, 0)], 0.0)

        # closed dilated arc [mid - half, mid + half]
        hi = mid + half
        k = np.floor(hi)
        i = np.searchsorted(x, hi - k, side="right")
        upper = k * cdf[-1] + np.where(i > 0, cdf[np.maximum(i - 1, 0)], 0.0)
        m = upper - below(mid - half)
        gens.append(n)
        js.append(pc.scales[n])
        mt.append(math.fsum(L ** s))
        ct.append(math.fsum(m ** p * L ** (1.0 - 2.0 * p)))
    return PrunedSums(gens, js, mt, ct)
