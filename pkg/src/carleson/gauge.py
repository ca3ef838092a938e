"""Gauge functions phi(t) = t * phi1(t), phi1(t) = int_t^1 ds / lambda(s).

Three kinds are provided: ``EntropyLog`` (lambda(t) = t, the classical
entropy condition), ``PowerAlpha`` (lambda(t) = t^(2-a)/(1-a), giving the
t^a conditions) and ``CustomLambda`` (a tabulated lambda). A
``PhiDyadicGrid`` is a subsequence of dyadic generations along which phi1
grows by a bounded factor.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .circle import GENERATION_CAP
from .errors import GridError, ParseError, RangeError
from .numerics import adaptive_simpson


class Gauge:
    """Common interface. All methods accept scalars or numpy arrays."""

    name = "gauge"

    def lam(self, t):
        raise NotImplementedError

    def phi1(self, t):
        raise NotImplementedError

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t > 0, t * self.phi1(np.where(t > 0, t, 1.0)), 0.0)
        return out if out.ndim else float(out)

    def inv_lambda_integral(self, a, b):
        """int_a^b dt / lambda(t)."""
        return self.phi1(a) - self.phi1(b)

    def phi1_integral(self, x: float) -> float:
        """int_0^x phi1(s) ds."""
        if x <= 0:
            return 0.0
        val, _ = integrate.quad(lambda s: float(self.phi1(s)), 0.0, x, limit=200)
        return val

    def eps_over_lambda_integral(self, a: float, b: float) -> float:
        """int_a^b eps / lambda(eps) d eps."""
        if b <= a:
            return 0.0
        val, _ = integrate.quad(lambda e: e / float(self.lam(e)), a, b, limit=200)
        return val

    def standard_generations(self, depth: int):
        return None

    def describe(self) -> str:
        return self.name


class EntropyLog(Gauge):
    name = "entropy"

    def lam(self, t):
        t = np.asarray(t, dtype=float)
        return t.copy() if t.ndim else float(t)

    def phi1(self, t):
        t = np.asarray(t, dtype=float)
        out = -np.log(t)
        return out if out.ndim else float(out)

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t > 0, -t * np.log(np.where(t > 0, t, 1.0)), 0.0) + 0.0
        return out if out.ndim else float(out)

    def inv_lambda_integral(self, a, b):
        out = np.log(np.asarray(b, dtype=float) / np.asarray(a, dtype=float))
        return out if out.ndim else float(out)

    def phi1_integral(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return x * (1.0 - math.log(x))

    def eps_over_lambda_integral(self, a: float, b: float) -> float:
        return max(b - a, 0.0)

    def standard_generations(self, depth: int):
        return [2 ** j for j in range(1, depth + 1)]


class PowerAlpha(Gauge):
    """lambda(t) = t^(2-a)/(1-a), so int_t^1 ds/lambda = t^(a-1) - 1.

    ``variant="nominal"`` uses phi(t) = t^a and phi1(t) = t^(a-1);
    ``variant="exact"`` uses phi(t) = t^a - t, the identity version. The two
    differ by t, which is negligible against t^a as t -> 0.
    """

    def __init__(self, alpha: float, variant: str = "nominal"):
        if not (0.0 < alpha < 1.0):
            raise RangeError("PowerAlpha needs 0 < alpha < 1")
        if variant not in ("nominal", "exact"):
            raise RangeError("variant must be 'nominal' or 'exact'")
        self.alpha = float(alpha)
        self.variant = variant
        self.name = f"power:{self.alpha:g}" + (":exact" if variant == "exact" else "")

    def __repr__(self) -> str:
        return f"PowerAlpha({self.alpha}, variant={self.variant!r})"

    def lam(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** (2.0 - self.alpha) / (1.0 - self.alpha)
        return out if out.ndim else float(out)

    def phi1(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** (self.alpha - 1.0)
        if self.variant == "exact":
            out = out - 1.0
        return out if out.ndim else float(out)

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** self.alpha
        if self.variant == "exact":
            out = out - t
        return out if out.ndim else float(out)

    def inv_lambda_integral(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = a ** (self.alpha - 1.0) - b ** (self.alpha - 1.0)
        return out if out.ndim else float(out)

    def phi1_integral(self, x: float) -> float:
        if x <= 0:
            return 0.0
        val = x ** self.alpha / self.alpha
        return val - x if self.variant == "exact" else val

    def eps_over_lambda_integral(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        al = self.alpha
        return (1.0 - al) / al * (b ** al - a ** al)

    def standard_generations(self, depth: int):
        return list(range(1, depth + 1))


class CustomLambda(Gauge):
    """Tabulated lambda with log-log linear interpolation.

    The input table is resampled onto log-spaced knots (64 per decade) down
    to the smallest tabulated t. phi1 at the knots is accumulated with
    adaptive Simpson in the variable u = log s; between knots the exact
    integral of the power-law interpolant is used. Outside the table the
    end segments are extended as power laws.
    """

    KNOTS_PER_DECADE = 64

    def __init__(self, t, lam, name: str = "custom"):
        t = np.asarray(t, dtype=float)
        lam = np.asarray(lam, dtype=float)
        if t.ndim != 1 or t.shape != lam.shape or t.size < 2:
            raise RangeError("lambda table needs at least two (t, lambda) rows")
        if np.any(t <= 0) or np.any(lam <= 0) or np.any(t > 1.0 + 1e-12):
            raise RangeError("lambda table entries must be positive with t in (0, 1]")
        order = np.argsort(t)
        t, lam = t[order], lam[order]
        if np.any(np.diff(t) <= 0):
            raise RangeError("duplicate t in lambda table")
        self.name = name
        lo = math.log10(t[0])
        n = max(2, int(math.ceil(-lo * self.KNOTS_PER_DECADE)) + 1)
        knots = np.logspace(lo, 0.0, n)
        self._lt_in, self._ll_in = np.log(t), np.log(lam)
        self.knots = knots
        self.knot_lam = np.exp(self._interp_log(np.log(knots)))
        lk = np.log(self.knots)
        self._lk = lk
        self._ex = np.diff(np.log(self.knot_lam)) / np.diff(lk)
        # cumulative int_{knot_k}^{1} ds / lambda via adaptive Simpson in log s
        seg = np.empty(n - 1)
        for k in range(n - 1):
            seg[k] = adaptive_simpson(lambda u: math.exp(u) / self._lam_scalar(math.exp(u)),
                                      lk[k], lk[k + 1], tol=1e-10 / n)
        self._seg = seg
        self._cum = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])

    @classmethod
    def from_csv(cls, path) -> "CustomLambda":
        path = Path(path)
        rows = []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            for no, row in enumerate(reader, 1):
                if not row or row[0].strip().startswith("#"):
                    continue
                if row[0].strip() == "t":
                    continue
                if len(row) != 2:
                    raise ParseError(f"{path}:{no}: expected 't,lambda'")
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError as exc:
                    raise ParseError(f"{path}:{no}: {exc}") from None
        if not rows:
            raise ParseError(f"{path}: empty lambda table")
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1], name=f"csv:{path.name}")

    def _interp_log(self, lt):
        lt = np.asarray(lt, dtype=float)
        xs, ys = self._lt_in, self._ll_in
        out = np.interp(lt, xs, ys)
        lo_slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
        hi_slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        out = np.where(lt < xs[0], ys[0] + lo_slope * (lt - xs[0]), out)
        out = np.where(lt > xs[-1], ys[-1] + hi_slope * (lt - xs[-1]), out)
        return out

    def _lam_scalar(self, s: float) -> float:
        return float(np.exp(self._interp_log(math.log(s))))

    def lam(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(self._interp_log(np.log(t)))
        return out if out.ndim else float(out)

    def _segment_integral(self, k, a, b):
        # int_a^b ds / lambda on segment k where lambda = L_k (s / t_k)^e
        e = self._ex[k]
        tk, lk = self.knots[k], self.knot_lam[k]
        p = 1.0 - e
        flat = np.abs(p) < 1e-12
        safe = np.where(flat, 1.0, p)
        power = (b ** safe - a ** safe) / safe
        return tk ** e / lk * np.where(flat, np.log(b / a), power)

    def phi1(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        k = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, self.knots.size - 2)
        out = np.empty_like(t)
        above = t >= 1.0
        inner = ~above
        kk = k[inner]
        out[inner] = self._cum[kk + 1] + self._segment_integral(kk, t[inner], self.knots[kk + 1])
        out[above] = -self._segment_integral(np.full(above.sum(), self.knots.size - 2), 1.0, t[above])
        return float(out[0]) if scalar else out

    def inv_lambda_integral(self, a, b):
        return self.phi1(a) - self.phi1(b)


def parse_gauge(spec: str) -> Gauge:
    """``entropy``, ``power:0.5``, ``power:0.5:exact`` or ``csv:path``."""
    spec = spec.strip()
    if spec == "entropy":
        return EntropyLog()
    if spec.startswith("power:"):
        parts = spec.split(":")
        try:
            alpha = float(parts[1])
        except (IndexError, ValueError):
            raise ParseError(f"bad gauge spec {spec!r}") from None
        variant = parts[2] if len(parts) > 2 else "nominal"
        return PowerAlpha(alpha, variant)
    if spec.startswith("csv:"):
        return CustomLambda.from_csv(spec[4:])
    raise ParseError(f"unknown gauge spec {spec!r}")


def phi_eval(g: Gauge, t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > 1):
        raise RangeError("phi is defined on [0, 1]")
    return g.phi(t)


def lambda_eval(g: Gauge, t):
    if np.any(np.asarray(t, dtype=float) <= 0):
        raise RangeError("lambda needs t > 0")
    return g.lam(t)


@dataclass(frozen=True)
class PhiDyadicGrid:
    generations: tuple
    c_lo: float
    c_hi: float
    gauge_name: str = ""
    growth: float = field(default=math.nan)

    @property
    def depth(self) -> int:
        return len(self.generations)

    @property
    def packing_constant(self) -> float:
        """Bound on phi1(2^-n_{j+1}) / phi1(2^-n_j) along the grid (at least 1)."""
        return max(1.0, self.growth)

    def to_json(self) -> str:
        return json.dumps({"generations": list(self.generations), "c_lo": self.c_lo,
                           "c_hi": self.c_hi})


def _greedy_next(g: Gauge, n: int) -> int:
    target = g.phi1(math.ldexp(1.0, -n))
    for m in range(n + 1, GENERATION_CAP + 1):
        if g.inv_lambda_integral(math.ldexp(1.0, -m), math.ldexp(1.0, -n)) >= target:
            return m
    raise GridError(f"grid cannot be continued past generation {n}: "
                    "int_0 ds/lambda does not diverge at table resolution")


def build_grid(g: Gauge, depth: int, greedy: bool = False) -> PhiDyadicGrid:
    if depth < 1:
        raise RangeError("grid depth must be at least 1")
    gens = None if greedy else g.standard_generations(depth + 1)
    if gens is None:
        gens = [1]
        while len(gens) < depth:
            gens.append(_greedy_next(g, gens[-1]))
        try:
            gens.append(_greedy_next(g, gens[-1]))
        except GridError:
            pass
    if any(n > GENERATION_CAP for n in gens[:depth]):
        raise GridError(f"grid of depth {depth} exceeds the generation cap {GENERATION_CAP}")
    ratios, growth = [], []
    usable = [n for n in gens if n <= GENERATION_CAP]
    for a, b in zip(usable, usable[1:]):
        ta, tb = math.ldexp(1.0, -a), math.ldexp(1.0, -b)
        base = float(g.phi1(ta))
        ratios.append(float(g.inv_lambda_integral(tb, ta)) / base)
        growth.append(float(g.phi1(tb)) / base)
    if not ratios:
        raise GridError("grid too short to certify")
    return PhiDyadicGrid(tuple(gens[:depth]), min(ratios), max(ratios), g.describe(),
                         max(growth))


@dataclass
class RegularityReport:
    g2_min: float
    g2_max: float
    g3_constant: float
    t_star: float
    violations: list

    def to_dict(self) -> dict:
        return {"g2_constants": [self.g2_min, self.g2_max], "g3_constant": self.g3_constant,
                "t_star": self.t_star, "violations": self.violations}


def check_regularity(g: Gauge, t_min: float = 2.0 ** -40, t_max: float = 0.5,
                     samples: int = 400, g2_ceiling: float = 4.0,
                     g3_ceiling: float = 50.0) -> RegularityReport:
    """Empirical (G2) doubling constants and the (G3) geometric-sum constant.

    Both are sampled on a log grid of t in [t_min, t_max]; t = 1 is excluded
    since phi(1) = 0 for the standard kinds.
    """
    ts = np.logspace(math.log10(t_min), math.log10(t_max), samples)
    thetas = np.linspace(1.0, 2.0, 21)
    ratios = g.lam(np.outer(ts, thetas)) / g.lam(ts)[:, None]
    g2_min, g2_max = float(ratios.min()), float(ratios.max())
    ks = np.arange(0, 200)
    scales = np.ldexp(1.0, -ks)
    sums = np.array([math.fsum(g.phi(t * scales)) for t in ts])
    g3 = float(np.max(sums / g.phi(ts)))
    fine = np.logspace(-12, 0, 2000)
    vals = g.phi(fine)
    drops = np.flatnonzero(np.diff(vals) < 0)
    t_star = float(fine[drops[0]]) if drops.size else 1.0
    violations = []
    if g2_max > g2_ceiling or g2_min <= 0:
        violations.append(f"G2 doubling constants ({g2_min:.4g}, {g2_max:.4g}) exceed ceiling")
    if not math.isfinite(g3) or g3 > g3_ceiling:
        violations.append(f"G3 constant {g3:.4g} exceeds ceiling {g3_ceiling}")
    return RegularityReport(g2_min, g2_max, g3, t_star, violations)
