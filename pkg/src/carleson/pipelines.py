"""Numeric surrogates for the two implication chains (Nevanlinna and Hardy).

Chain for the Nevanlinna statement (entropy gauge):
    (0) supp mu inside a BC set   -> entropy arc sum of the support
    (1) S' in the Nevanlinna class -> int log+ |S'| on the circle
    (2) area condition, sigma = 1  -> sublevel area integral
    (3) countable union of BC sets -> corona tree sum of |I|
Chain for the Hardy statement, 0 < p < 1/2:
    (1) S' in H^p                  -> int |S'|^p on the circle
    (2) (1+p)-area condition       -> sublevel area integral, sigma = 1 + p
    (3) countable union of (1-p)-BC sets -> corona tree sum of |I|^(1-p)

A single finite atomic measure makes every condition finite, so the chains
are really exercised on sequences of measures (Cantor generations, the n-atom
family): a condition "diverges" along the sequence when the positive parts of
the increments of its running maximum fail to be summable. An implication is violated
when an earlier condition converges while a later one diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .bcnorm import arc_sum
from .circle import GENERATION_CAP, AtomicMeasure
from .corona import (corona_decompose, sublevel_area_integral, threshold_for_level,
                     tree_terms)
from .errors import RangeError
from .gauge import EntropyLog
from .inner import hp_norm_boundary, nevanlinna_norm
from .numerics import CONVERGES, DIVERGES, INCONCLUSIVE, classify_from_peak, classify_series

# corona depth beyond the finest atom spacing
EXTRA_DEPTH = 12


@dataclass
class Condition:
    name: str
    status: str
    value: float
    values: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": self.value,
                "values": [float(v) for v in self.values], **self.detail}


@dataclass
class ImplicationReport:
    chain: str
    mode: str
    conditions: list
    violations: list

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"chain": self.chain, "mode": self.mode, "consistent": self.consistent,
                "violations": self.violations,
                "conditions": [c.to_dict() for c in self.conditions]}


@dataclass(frozen=True)
class PipelineParams:
    """The area condition is taken at |S_mu| < level, i.e. P_mu > log(1/level).

    The corona constant M is independent of the level: both conditions are
    qualitative in their constant. With M = 1 a probability measure makes the
    whole circle heavy, so the first extracted set follows the support.
    """

    level: float = 0.5
    M: float = 1.0
    divisor: float = 100.0
    depth: int = 0  # 0: pick from the atom spacing
    area_budget: float = 4e4
    whitney_depth: int = 40

    @property
    def threshold(self) -> float:
        return threshold_for_level(self.level)


def resolution_depth(mu: AtomicMeasure, M: float) -> int:
    """Corona depth: the generation by which atoms are separated and every
    atom has turned heavy, plus a margin."""
    x = mu.positions
    if not x.size:
        return 0
    n = math.log2(M / float(mu.masses.min()))
    if x.size > 1:
        gaps = np.diff(np.append(x, x[0] + 1.0))
        n = max(n, -math.log2(gaps.min()))
    return int(min(GENERATION_CAP, max(math.ceil(n), 0) + EXTRA_DEPTH))


def _violations(conds: list) -> list:
    out = []
    for i, a in enumerate(conds):
        for b in conds[i + 1:]:
            if a.status == CONVERGES and b.status == DIVERGES:
                out.append(f"{a.name} converges but {b.name} diverges")
    return out


def _surrogates(mu: AtomicMeasure, kind: str, p: float, prm: PipelineParams) -> dict:
    """Per-measure surrogate values with their own series verdicts."""
    out = {}
    if kind == "nevanlinna":
        if len(mu):
            q = arc_sum(mu.support(), EntropyLog())
            out["(0) BC support"] = (q.value, CONVERGES)
        else:
            out["(0) BC support"] = (0.0, CONVERGES)
        r = nevanlinna_norm(mu, depth=prm.whitney_depth)
        out["(1) Nevanlinna"] = (r.value, r.status)
        sigma, beta = 1.0, 1.0
    else:
        r = hp_norm_boundary(mu, p, depth=prm.whitney_depth) if len(mu) else None
        out["(1) H^p"] = (r.value, r.status) if r else (0.0, CONVERGES)
        sigma, beta = 1.0 + p, 1.0 - p
    if len(mu):
        a = sublevel_area_integral(mu, prm.threshold, sigma,
                                   budget=prm.area_budget)
        out["(2) area"] = (a.value, a.status)
        depth = prm.depth or resolution_depth(mu, prm.M)
        d = corona_decompose(mu, prm.M, depth, prm.divisor)
        v = classify_from_peak(tree_terms(d, beta))
        out["(3) corona BC"] = (v.estimate if v.finite else v.value, v.status)
    else:
        out["(2) area"] = (0.0, CONVERGES)
        out["(3) corona BC"] = (0.0, CONVERGES)
    return out


def sequence_verdict(values: Sequence[float], statuses: Sequence[str]) -> tuple[str, dict]:
    """Verdict for a quantity along a sequence of measures.

    A diverging member makes the quantity diverge and an inconclusive one
    makes it inconclusive. Otherwise the positive increments of the running
    maximum are classified: divergence means an unbounded sup, and the
    maximum ignores period-two wobble between members.
    """
    if any(s == DIVERGES for s in statuses) or not all(np.isfinite(values)):
        return DIVERGES, {"reason": "a member of the sequence diverges"}
    if any(s == INCONCLUSIVE for s in statuses):
        return INCONCLUSIVE, {"reason": "a member of the sequence is inconclusive"}
    run = np.maximum.accumulate(np.asarray(values, dtype=float))
    inc = np.diff(run)
    if not inc.size:
        return INCONCLUSIVE, {"increments": []}
    verdict = classify_series(inc, window=len(inc))
    return verdict.status, {"increments": [float(t) for t in inc]}


def _run(mus, kind: str, p: float, prm: PipelineParams) -> ImplicationReport:
    if isinstance(mus, AtomicMeasure):
        s = _surrogates(mus, kind, p, prm)
        conds = [Condition(k, st, v, [v]) for k, (v, st) in s.items()]
        return ImplicationReport(kind, "single", conds, _violations(conds))
    rows = [_surrogates(mu, kind, p, prm) for mu in mus]
    if not rows:
        raise RangeError("empty measure sequence")
    conds = []
    for k in rows[0]:
        vals = [r[k][0] for r in rows]
        status, detail = sequence_verdict(vals, [r[k][1] for r in rows])
        conds.append(Condition(k, status, float(vals[-1]), vals, detail))
    return ImplicationReport(kind, "sequence", conds, _violations(conds))


Measures = Union[AtomicMeasure, Sequence[AtomicMeasure]]


def nevanlinna_pipeline(mu: Measures, params: PipelineParams = PipelineParams()) -> ImplicationReport:
    """Chain (0) => (1) => (2) => (3) with the entropy gauge."""
    return _run(mu, "nevanlinna", 0.0, params)


def hardy_pipeline(mu: Measures, p: float,
                   params: PipelineParams = PipelineParams()) -> ImplicationReport:
    """Chain (1) => (2) => (3) for derivatives in H^p."""
    if not (0.0 < p < 0.5):
        raise RangeError("need 0 < p < 1/2")
    return _run(mu, "hardy", p, params)
