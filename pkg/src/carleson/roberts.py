"""Roberts grating decomposition of an atomic measure.

Given a gauge phi, a phi-dyadic grid n_1 < n_2 < ... and C > 0, the measure
is peeled layer by layer: at layer j every dyadic arc I of generation
n_{j+j0} carrying more than C phi(|I|) of the current remainder is heavy and
the remainder on I is scaled down uniformly to exactly C phi(|I|); light arcs
give up all of their mass. What is left after the last layer sits inside the
final heavy arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circle import Arc, AtomicMeasure, ClosedSet, DyadicArc, dyadic_index
from .errors import GridError, RangeError
from .gauge import Gauge, PhiDyadicGrid

# relative slack when re-checking mu_j(I) <= C phi(|I|) after rounding
LAYER_TOL = 1e-12


@dataclass
class GrateResult:
    grated: AtomicMeasure
    remainder: AtomicMeasure
    heavy_arcs: list


def _check_partition(partition: Sequence[Arc]) -> list[Arc]:
    arcs = sorted(partition, key=lambda a: a.left)
    if not arcs:
        raise RangeError("empty partition")
    total = math.fsum(a.length for a in arcs)
    if abs(total - 1.0) > 1e-12:
        raise RangeError(f"partition lengths sum to {total!r}, not 1")
    for a, b in zip(arcs, arcs[1:]):
        if abs(a.left + a.length - b.left) > 1e-12:
            raise RangeError("partition arcs must tile the circle")
    return arcs


def grate(mu: AtomicMeasure, partition: Sequence[Arc], C: float, g: Gauge) -> GrateResult:
    """Cap the mass of mu on every arc of the partition at C phi(|I|)."""
    if C <= 0:
        raise RangeError("C must be positive")
    arcs = _check_partition(partition)
    factor = np.ones(len(mu))
    heavy = []
    for arc in arcs:
        inside = arc.contains(mu.positions)
        m = math.fsum(mu.masses[inside])
        cap = C * float(g.phi(arc.length))
        if m > cap:
            heavy.append(arc)
            factor[inside] = cap / m
    grated = mu.masses * factor
    return GrateResult(AtomicMeasure(mu.positions, grated),
                       AtomicMeasure(mu.positions, mu.masses - grated), heavy)


@dataclass
class Layer:
    generation: int
    masses: np.ndarray = field(repr=False)  # per atom of the input measure
    heavy: np.ndarray = field(repr=False)  # dyadic indices of heavy arcs
    light_count: int = 0

    @property
    def mass(self) -> float:
        return math.fsum(self.masses)


@dataclass
class RobertsDecomposition:
    mu: AtomicMeasure
    layers_raw: list
    residual_masses: np.ndarray = field(repr=False)
    gauge: Gauge = field(repr=False)
    grid: PhiDyadicGrid = field(repr=False)
    C: float = 1.0
    j0: int = 0

    @property
    def layers(self) -> list[AtomicMeasure]:
        return [AtomicMeasure(self.mu.positions, L.masses) for L in self.layers_raw]

    @property
    def residual(self) -> AtomicMeasure:
        return AtomicMeasure(self.mu.positions, self.residual_masses)

    @property
    def residual_mass(self) -> float:
        return math.fsum(self.residual_masses)

    def light_arc_entropy(self) -> float:
        return light_arc_entropy(self)

    def bound(self) -> float:
        """Upper bound for the light-arc entropy.

        K (2^n phi(2^-n) + mu(T)/C) with n the first partition's generation and
        K the grid's packing constant. Layer one can contribute at most all 2^n
        arcs; each later light arc sits in a heavy parent I whose grated mass is
        exactly C phi(|I|), and its children's phi-sum is at most K phi(|I|).
        """
        if not self.layers_raw:
            return 0.0
        n = self.layers_raw[0].generation
        first = math.ldexp(1.0, n) * float(self.gauge.phi(math.ldexp(1.0, -n)))
        return self.grid.packing_constant * (first + self.mu.total() / self.C)

    def residual_support(self) -> ClosedSet:
        """The final heavy arcs as residual of a ClosedSet containing supp mu_inf."""
        if not self.layers_raw:
            return ClosedSet.full_circle()
        last = self.layers_raw[-1]
        n = last.generation
        idx = np.sort(last.heavy)
        if idx.size == 0:
            return ClosedSet.from_arrays([0.0], [1.0], [], [])
        t = math.ldexp(1.0, -n)
        # merge runs of consecutive heavy arcs
        starts = np.flatnonzero(np.diff(idx, prepend=idx[0] - 2) != 1)
        ends = np.append(starts[1:], idx.size) - 1
        lefts = np.ldexp(idx[starts].astype(float), -n)
        lens = (idx[ends] - idx[starts] + 1) * t
        if lefts.size > 1 and idx[0] == 0 and idx[-1] == (1 << n) - 1:
            lefts[0] = lefts[-1]
            lens[0] += lens[-1]
            lefts, lens = lefts[:-1], lens[:-1]
        rights = lefts + lens
        nxt = np.append(lefts[1:], lefts[0] + 1.0)
        gl = np.mod(rights, 1.0)
        glen = nxt - rights
        keep = glen > 0
        return ClosedSet.from_arrays(gl[keep], glen[keep], np.mod(lefts, 1.0), lens)

    def check(self) -> dict:
        """Re-verify mass conservation and every layer bound from scratch."""
        total = np.sum([L.masses for L in self.layers_raw], axis=0) if self.layers_raw \
            else np.zeros(len(self.mu))
        total = total + self.residual_masses
        m = self.mu.masses
        conserve = float(np.max(np.abs(total - m) / m)) if m.size else 0.0
        worst = 0.0
        for L in self.layers_raw:
            if not L.masses.size:
                continue
            idx = dyadic_index(self.mu.positions, L.generation)
            u, inv = np.unique(idx, return_inverse=True)
            per = np.bincount(inv, weights=L.masses)
            cap = self.C * float(self.gauge.phi(math.ldexp(1.0, -L.generation)))
            worst = max(worst, float(np.max(per)) / cap)
        nested = True
        for a, b in zip(self.layers_raw, self.layers_raw[1:]):
            nested &= (b.generation > a.generation)
        return {"conservation_rel_error": conserve, "max_layer_load": worst,
                "layer_bound_ok": worst <= 1.0 + LAYER_TOL,
                "conservation_ok": conserve <= 1e-12, "refines": bool(nested)}

    def to_dict(self) -> dict:
        return {
            "layers": [{"generation": L.generation, "mass": L.mass,
                        "heavy_count": int(L.heavy.size), "light_count": L.light_count}
                       for L in self.layers_raw],
            "residual_mass": self.residual_mass,
            "light_entropy": self.light_arc_entropy(),
            "bound": self.bound(),
            "C": self.C, "j0": self.j0, "gauge": self.gauge.describe(),
        }


def roberts_decompose(mu: AtomicMeasure, g: Gauge, grid: PhiDyadicGrid, C: float = 1.0,
                      j0: int = 0, max_layers: int = 12) -> RobertsDecomposition:
    if C <= 0:
        raise RangeError("C must be positive")
    if j0 < 0 or max_layers < 0:
        raise RangeError("j0 and max_layers must be non-negative")
    if grid.depth < j0 + max_layers:
        raise GridError(f"grid depth {grid.depth} < j0 + max_layers = {j0 + max_layers}")
    rem = mu.masses.copy()
    layers = []
    prev_heavy_count, prev_gen = None, None
    for j in range(1, max_layers + 1):
        n = grid.generations[j + j0 - 1]
        cap = C * float(g.phi(math.ldexp(1.0, -n)))
        grated = rem.copy()
        heavy = np.zeros(0, dtype=np.int64)
        if rem.size:
            idx = dyadic_index(mu.positions, n)
            u, inv = np.unique(idx, return_inverse=True)
            per = np.bincount(inv, weights=rem)
            hv = per > cap
            heavy = u[hv]
            if hv.any():
                scale = np.where(hv, cap / np.where(per > 0, per, 1.0), 1.0)
                grated = rem * scale[inv]
        if prev_heavy_count is None:
            arcs_here = 1 << n
        else:
            arcs_here = prev_heavy_count << (n - prev_gen)
        light = arcs_here - int(heavy.size)
        layers.append(Layer(n, grated, heavy, light))
        rem = rem - grated
        rem[rem < 0] = 0.0
        prev_heavy_count, prev_gen = int(heavy.size), n
    return RobertsDecomposition(mu, layers, rem, g, grid, C, j0)


def light_arc_entropy(d: RobertsDecomposition) -> float:
    """Sum of phi(|I|) over light arcs of every layer.

    Layer one counts every arc of its partition; later layers count the light
    arcs inside the previous layer's heavy arcs (outside them the remainder is
    already zero).
    """
    return math.fsum(L.light_count * float(d.gauge.phi(math.ldexp(1.0, -L.generation)))
                     for L in d.layers_raw)


@dataclass
class ChargeRow:
    j0: int
    layers: int
    residual_mass: float
    layer_mass_on_set: Optional[float]
    residual_mass_on_set: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def charges_bc_test(mu: AtomicMeasure, g: Gauge, grid: PhiDyadicGrid, C: float,
                    offsets: Sequence[int], E: Optional[ClosedSet] = None,
                    max_layers: Optional[int] = None) -> list[ChargeRow]:
    """Residual mass (and mass on E) of the decomposition for each offset j0.

    A measure charging a BC set keeps residual mass bounded away from zero as
    j0 grows; a non-charging one loses it. Each run uses as many layers as the
    grid allows past the offset, capped by ``max_layers``.
    """
    rows = []
    on_E = E.contains(mu.positions) if E is not None else None
    for j0 in offsets:
        layers = grid.depth - j0
        if max_layers is not None:
            layers = min(layers, max_layers)
        if layers < 1:
            raise GridError(f"grid too shallow for offset {j0}")
        d = roberts_decompose(mu, g, grid, C, j0, layers)
        lm = rm = None
        if on_E is not None:
            lm = math.fsum(np.sum([L.masses[on_E] for L in d.layers_raw], axis=0)) \
                if on_E.any() else 0.0
            rm = math.fsum(d.residual_masses[on_E])
        rows.append(ChargeRow(j0, layers, d.residual_mass, lm, rm))
    return rows


def dyadic_partition(n: int) -> list[Arc]:
    return [DyadicArc(n, k).arc for k in range(1 << n)]
