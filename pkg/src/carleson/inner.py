"""Singular inner functions of atomic measures and their norms.

Points of the disk are complex numbers; boundary points are given in turns,
so theta corresponds to exp(2 pi i theta). The Poisson integral is normalised
so that a unit atom gives P(0) = 1, i.e. P(z) = sum m (1 - |z|^2)/|zeta - z|^2,
and S(z) = exp(-sum m (zeta + z)/(zeta - z)). Boundary integrals are taken
with respect to arclength in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize, special

from .circle import AtomicMeasure, ClosedSet
from .errors import RangeError
from .numerics import (CONVERGES, DIVERGES, INCONCLUSIVE, classify_from_peak, classify_series,
                       gauss_legendre)

TWO_PI = 2.0 * math.pi
# elements per block when forming (points x atoms) matrices
CHUNK = 1 << 22


@dataclass(frozen=True)
class DiskPoint:
    re: float
    im: float

    def __post_init__(self):
        if self.re * self.re + self.im * self.im >= 1.0:
            raise RangeError("point must lie strictly inside the unit disk")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def polar(cls, r: float, theta: float) -> "DiskPoint":
        z = r * np.exp(2j * math.pi * theta)
        return cls(float(z.real), float(z.imag))


def _as_z(z) -> np.ndarray:
    if isinstance(z, DiskPoint):
        z = z.z
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise RangeError("points must lie strictly inside the unit disk")
    return z


def _blocked(fn: Callable, n_points: int, n_atoms: int, *arrays) -> np.ndarray:
    """Evaluate fn on row blocks so the points x atoms matrix stays bounded."""
    step = max(1, CHUNK // max(n_atoms, 1))
    parts = [fn(*(a[s:s + step] for a in arrays)) for s in range(0, n_points, step)]
    return np.concatenate(parts) if parts else np.zeros(0)


def poisson_polar(mu: AtomicMeasure, r, theta) -> np.ndarray:
    """P_mu at r exp(2 pi i theta), in the cancellation-free form
    (1 - r^2) / ((1 - r)^2 + 4 r sin^2(pi (theta - x)))."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r, theta = np.broadcast_arrays(r, theta)
    shape = r.shape
    r, theta = r.ravel(), theta.ravel()
    if not len(mu):
        return np.zeros(shape)
    x, m = mu.positions, mu.masses

    def block(rb, tb):
        s = np.sin(math.pi * (tb[:, None] - x[None, :]))
        den = (1.0 - rb[:, None]) ** 2 + 4.0 * rb[:, None] * s * s
        return ((1.0 - rb * rb)[:, None] * m[None, :] / den).sum(axis=1)

    return _blocked(block, r.size, len(mu), r, theta).reshape(shape)


def poisson(mu: AtomicMeasure, z):
    z = _as_z(z)
    out = poisson_polar(mu, np.abs(z), np.mod(np.angle(z) / TWO_PI, 1.0))
    return out if out.ndim else float(out)


def _zeta(mu: AtomicMeasure) -> np.ndarray:
    return np.exp(2j * math.pi * mu.positions)


def herglotz(mu: AtomicMeasure, z):
    """sum m (zeta + z) / (zeta - z)."""
    z = _as_z(z)
    shape = z.shape
    z = z.ravel()
    if not len(mu):
        return np.zeros(shape, dtype=complex)
    zeta, m = _zeta(mu), mu.masses

    def block(zb):
        return (m[None, :] * (zeta[None, :] + zb[:, None]) / (zeta[None, :] - zb[:, None])).sum(1)

    out = np.concatenate([block(z[s:s + max(1, CHUNK // len(mu))])
                          for s in range(0, z.size, max(1, CHUNK // len(mu)))])
    out = out.reshape(shape)
    return out if out.ndim else complex(out)


def s_mu(mu: AtomicMeasure, z):
    return np.exp(-herglotz(mu, z))


def h_factor(mu: AtomicMeasure, z):
    """h with S' = h S, namely -2 sum m zeta / (zeta - z)^2."""
    z = _as_z(z)
    shape = z.shape
    z = z.ravel()
    if not len(mu):
        return np.zeros(shape, dtype=complex)
    zeta, m = _zeta(mu), mu.masses
    step = max(1, CHUNK // len(mu))
    out = np.concatenate([
        (-2.0 * m[None, :] * zeta[None, :] / (zeta[None, :] - z[s:s + step, None]) ** 2).sum(1)
        for s in range(0, z.size, step)])
    out = out.reshape(shape)
    return out if out.ndim else complex(out)


def s_mu_deriv(mu: AtomicMeasure, z):
    return h_factor(mu, z) * s_mu(mu, z)


def s_mu_deriv_abs_polar(mu: AtomicMeasure, r, theta) -> np.ndarray:
    """|S'(z)| = |h(z)| exp(-P(z)) at r exp(2 pi i theta)."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r, theta = np.broadcast_arrays(r, theta)
    z = r * np.exp(2j * math.pi * theta)
    return np.abs(h_factor(mu, z)) * np.exp(-poisson_polar(mu, r, theta))


def s_mu_deriv_boundary(mu: AtomicMeasure, theta):
    """Ahern-Clark angular derivative 2 sum m / |zeta - e^{i theta}|^2."""
    th = np.asarray(theta, dtype=float)
    shape = th.shape
    th = th.ravel()
    if not len(mu):
        out = np.zeros(shape)
        return out if out.ndim else 0.0
    x, m = mu.positions, mu.masses

    def block(tb):
        s = np.sin(math.pi * (tb[:, None] - x[None, :]))
        s2 = s * s
        with np.errstate(divide="ignore"):
            return (m[None, :] / (2.0 * s2)).sum(1)

    out = _blocked(block, th.size, len(mu), th)
    # atoms sitting exactly on theta
    hit = np.isin(np.mod(th, 1.0), x)
    out[hit] = math.inf
    out = out.reshape(shape)
    return out if out.ndim else float(out)


# -- reports ---------------------------------------------------------------

@dataclass
class NormReport:
    value: float
    status: str
    method: str
    terms: list = field(default_factory=list, repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def diverging(self) -> bool:
        return self.status == DIVERGES

    def to_dict(self) -> dict:
        return {"value": self.value, "status": self.status, "method": self.method,
                "terms": [float(t) for t in self.terms], **self.meta}


def _check_p(p: float) -> None:
    if not (0.0 < p < 0.5):
        raise RangeError("need 0 < p < 1/2")


def _scale_terms(lengths: np.ndarray, values: np.ndarray) -> list[float]:
    """Group per-arc values by dyadic length scale, coarse to fine."""
    if not lengths.size:
        return []
    k = np.floor(-np.log2(lengths)).astype(int)
    k = np.maximum(k, 0)
    out = np.zeros(int(k.max()) + 1)
    np.add.at(out, k, values)
    return [float(v) for v in out]


# -- boundary quadrature ---------------------------------------------------

def inter_atom_arcs(mu: AtomicMeasure) -> tuple[np.ndarray, np.ndarray]:
    """Left ends and lengths of the arcs between consecutive atoms."""
    x = mu.positions
    if not x.size:
        return np.zeros(0), np.zeros(0)
    nxt = np.append(x[1:], x[0] + 1.0)
    return x.copy(), nxt - x


def _deriv_local(mu: AtomicMeasure, base: np.ndarray, off: np.ndarray) -> np.ndarray:
    """|S'| on the circle at x[base] + off.

    Distances are formed as (x[base] - x[j]) + off so that points very close
    to an atom keep their full relative precision.
    """
    x, m = mu.positions, mu.masses
    xb = x[base]

    def block(b, o):
        s = np.sin(math.pi * ((b[:, None] - x[None, :]) + o[:, None]))
        return (m[None, :] / (2.0 * s * s)).sum(1)

    return _blocked(block, off.size, x.size, xb, off)


def _whitney_nodes(lens, depth: int, order: int):
    """Gauss nodes on the Whitney tiling of every inter-atom arc (vectorised).

    Each node is given relative to the nearer end of its arc: ``side`` is 0
    for the left atom and 1 for the right one, ``off`` the signed offset in
    turns. Also returns weights (turns), the arc id of each node and the edge
    length left untiled at each end.
    """
    xg, wg = gauss_legendre(order)
    # unit offsets measured from the near end, never from the far one
    u = [0.25 + 0.5 * xg]
    sz = [0.5]
    side = [0]
    for k in range(1, depth):
        ell = 2.0 ** -(k + 2)
        u += [ell + ell * xg, -(2.0 * ell - ell * xg)]
        sz += [ell, ell]
        side += [0, 1]
    u = np.stack(u)  # pieces x nodes
    sz = np.array(sz)
    side = np.broadcast_to(np.array(side)[:, None], u.shape)
    off = lens[:, None, None] * u[None]
    w = lens[:, None, None] * (sz[:, None] * wg[None, :])[None]
    aid = np.broadcast_to(np.arange(lens.size)[:, None, None], off.shape)
    side = np.broadcast_to(side[None], off.shape)
    edge = lens * 2.0 ** -(depth + 1)
    return off.ravel(), w.ravel(), aid.ravel(), side.ravel(), edge


def _tile_bounds(depth: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit offsets (from the near end) and side of each Whitney tile, in the
    order used by _whitney_nodes."""
    lo, hi, side = [0.25], [0.75], [0]
    for k in range(1, depth):
        ell = 2.0 ** -(k + 2)
        lo += [ell, -2.0 * ell]
        hi += [2.0 * ell, -ell]
        side += [0, 1]
    return np.array(lo), np.array(hi), np.array(side)


def _split_tiles(mu, lens, depth, order, transform, level, vals):
    """Corrections for tiles where |S'| crosses ``level``: transform has a kink
    there, which Gauss-Legendre on the whole tile resolves only to O(h^2).
    Such tiles are redone piecewise between the crossings."""
    N = lens.size
    lo, hi, side = _tile_bounds(depth)
    P = lo.size
    f = vals.reshape(N, P, order)
    a = np.repeat(np.arange(N), P)
    sd = np.tile(side, N)
    base = np.where(sd == 0, a, (a + 1) % N)
    f_lo = _deriv_local(mu, base, (lens[:, None] * lo[None]).ravel()).reshape(N, P)
    f_hi = _deriv_local(mu, base, (lens[:, None] * hi[None]).ravel()).reshape(N, P)
    fmin = np.minimum(np.minimum(f.min(2), f_lo), f_hi)
    fmax = np.maximum(np.maximum(f.max(2), f_lo), f_hi)
    xg, wg = gauss_legendre(order)
    fix = np.zeros(N)
    for i, j in zip(*np.nonzero((fmin < level) & (fmax > level))):
        b = int(i) if side[j] == 0 else (int(i) + 1) % N
        ends = (lens[i] * lo[j], lens[i] * hi[j])
        g = lambda o: math.log(float(_deriv_local(mu, np.array([b]), np.array([o]))[0]) / level)
        # brackets from the values already at hand: tile ends and nodes
        grid = np.concatenate([[ends[0]], ends[0] + (ends[1] - ends[0]) * xg, [ends[1]]])
        gv = np.log(np.concatenate([[f_lo[i, j]], f[i, j], [f_hi[i, j]]]) / level)
        cuts = [ends[0]]
        for o1, o2, v1, v2 in zip(grid, grid[1:], gv, gv[1:]):
            if v1 * v2 < 0:
                cuts.append(optimize.brentq(g, o1, o2, xtol=1e-300, rtol=1e-15))
        cuts.append(ends[1])
        exact = 0.0
        for c1, c2 in zip(cuts, cuts[1:]):
            o = c1 + (c2 - c1) * xg
            exact += (c2 - c1) * float(np.dot(wg, transform(_deriv_local(
                mu, np.full(order, b), o))))
        width = abs(ends[1] - ends[0])
        fix[i] += exact * np.sign(ends[1] - ends[0]) - width * float(
            np.dot(wg, transform(f[i, j])))
    return fix


def _boundary_integral(mu: AtomicMeasure, transform: Callable, tail: Callable,
                       depth: int, order: int, kink: Optional[float] = None):
    """Per-arc integrals (radians) of transform(|S'|) over the inter-atom arcs.
    ``kink`` names a level of |S'| where transform is not smooth."""
    lefts, lens = inter_atom_arcs(mu)
    if not lefts.size:
        return lefts, lens, np.zeros(0)
    if depth < 1:
        raise RangeError("whitney depth must be at least 1")
    N = lefts.size
    off, w, aid, side, edge = _whitney_nodes(lens, depth, order)
    base = np.where(side == 0, aid, (aid + 1) % N)
    raw = _deriv_local(mu, base, off)
    vals = transform(raw)
    per = np.bincount(aid, weights=vals * w, minlength=N)
    if kink is not None:
        per += _split_tiles(mu, lens, depth, order, transform, kink, raw)
    # edge pieces: the value at the inner end of each edge fixes the local power law
    a = np.arange(N)
    fl = _deriv_local(mu, a, edge)
    fr = _deriv_local(mu, (a + 1) % N, -edge)
    per += tail(fl, edge) + tail(fr, edge)
    return lefts, lens, per * TWO_PI


def hp_norm_boundary(mu: AtomicMeasure, p: float, E: Optional[ClosedSet] = None,
                     depth: int = 40, order: int = 10) -> NormReport:
    """int |S'(e^{i theta})|^p d theta by Whitney quadrature between atoms.

    Near each atom |S'|^p behaves like c d^(-2p), which is integrable for
    p < 1/2; the untiled edge of length e contributes f(e) e / (1 - 2p).
    """
    _check_p(p)
    if E is not None and len(mu) and not np.all(E.contains(mu.positions)):
        raise RangeError("measure is not supported on E")
    lefts, lens, per = _boundary_integral(
        mu, lambda v: v ** p, lambda f, e: f ** p * e / (1.0 - 2.0 * p), depth, order)
    value = math.fsum(per)
    return NormReport(value, CONVERGES, "whitney-quadrature", _scale_terms(lens, per),
                      {"p": p, "depth": depth, "arcs": int(lens.size)})


def nevanlinna_norm(mu: AtomicMeasure, E: Optional[ClosedSet] = None, depth: int = 40,
                    order: int = 10) -> NormReport:
    """int log+ |S'(e^{i theta})| d theta by Whitney quadrature between atoms."""
    if E is not None and len(mu) and not np.all(E.contains(mu.positions)):
        raise RangeError("measure is not supported on E")

    def tail(f, e):
        # |S'| ~ c / d^2 near the atom with c = f e^2
        c = f * e * e
        return np.where(f >= 1.0, e * (np.log(np.maximum(f, 1.0)) + 2.0), 2.0 * np.sqrt(c))

    lefts, lens, per = _boundary_integral(
        mu, lambda v: np.log(np.maximum(v, 1.0)), tail, depth, order, kink=1.0)
    return NormReport(math.fsum(per), CONVERGES, "whitney-quadrature", _scale_terms(lens, per),
                      {"depth": depth, "arcs": int(lens.size)})


# -- hp-test and Hoelder factors --------------------------------------------

def gap_points(E: ClosedSet) -> tuple[np.ndarray, np.ndarray]:
    """z_J = (1 - |J|/2) exp(2 pi i theta_J), theta_J the midpoint of J."""
    L = E.gap_len
    return 1.0 - 0.5 * L, np.mod(E.gap_left + 0.5 * L, 1.0)


def _gap_groups(E: ClosedSet, values: np.ndarray) -> list[float]:
    """Sum values over gaps of equal length, longest first (one term per
    Cantor generation); falls back to dyadic scales for irregular sets."""
    L = E.gap_len
    if not L.size:
        return []
    u, inv = np.unique(np.round(L, 15), return_inverse=True)
    if u.size <= 64:
        sums = np.bincount(inv, weights=values)
        return [float(s) for s in sums[::-1]]
    return _scale_terms(L, values)


def hp_test_terms(mu: AtomicMeasure, E: ClosedSet, p: float) -> np.ndarray:
    r, th = gap_points(E)
    u = poisson_polar(mu, r, th)
    return u ** p * E.gap_len ** (1.0 - p)


def hp_test_sum(mu: AtomicMeasure, E: ClosedSet, p: float) -> NormReport:
    """sum over gaps J of u(z_J)^p |J|^(1-p), terms grouped by gap generation."""
    _check_p(p)
    if len(mu) and not np.all(E.contains(mu.positions)):
        raise RangeError("measure is not supported on E")
    t = hp_test_terms(mu, E, p)
    terms = _gap_groups(E, t)
    verdict = classify_series(terms) if terms else None
    status = CONVERGES if verdict is None else verdict.status
    return NormReport(math.fsum(t), status, "closed-form", terms, {"p": p, "gaps": int(t.size)})


@dataclass
class HoelderFactors:
    factor_A: float
    factor_B: float
    delta: float
    hp_test: float

    @property
    def product(self) -> float:
        return self.factor_A * self.factor_B

    def to_dict(self) -> dict:
        return {"factor_A": self.factor_A, "factor_B": self.factor_B, "delta": self.delta,
                "product": self.product, "hp_test": self.hp_test}


def hoelder_delta(p: float, q: float) -> float:
    """delta with delta p / (delta - p) = q."""
    return q * p / (q - p)


def cullen_hoelder_factors(mu: AtomicMeasure, E: ClosedSet, p: float, q: float) -> HoelderFactors:
    """Split the hp-test sum by Hoelder with exponents delta/p and delta/(delta-p).

    The threshold value q = p/(1-p) (delta = 1) is accepted so that the sharp
    case can be probed.
    """
    _check_p(p)
    if not q >= p / (1.0 - p) * (1.0 - 1e-12):
        raise RangeError("need q >= p/(1-p)")
    d = min(hoelder_delta(p, q), 1.0)
    r, th = gap_points(E)
    u = poisson_polar(mu, r, th)
    L = E.gap_len
    A = math.fsum(u ** d * L) ** (p / d)
    B = math.fsum(L ** (1.0 - q)) ** ((d - p) / d)
    return HoelderFactors(A, B, d, math.fsum(u ** p * L ** (1.0 - p)))


# -- top-box quadrature in the disk ----------------------------------------

def top_box_harnack(n: int) -> float:
    """Harnack constant between the centre of a generation-n top box and its
    corners: (1 + rho)/(1 - rho), rho the largest pseudo-hyperbolic distance."""
    L = math.ldexp(1.0, -n)
    zc = (1.0 - 0.75 * L)
    rho = 0.0
    for t in (0.5 * L, L):
        for a in (-0.5 * L, 0.5 * L):
            w = (1.0 - t) * np.exp(2j * math.pi * a)
            rho = max(rho, abs(w - zc) / abs(1.0 - zc * w))
    return (1.0 + rho) / (1.0 - rho)


@dataclass
class BoxSweep:
    """Per-generation totals of a top-box quadrature."""

    terms: list
    inner: list
    outer: list
    boxes: list
    stopped: str

    def verdict(self):
        return classify_from_peak(self.terms)


def box_sweep(sample: Callable, keep: Callable, max_gen: int = 48, k: int = 2,
              budget: float = 6e4, min_gen: int = 6, stable_tol: float = 0.01) -> BoxSweep:
    """Walk the dyadic top boxes generation by generation.

    ``sample(r, theta, t)`` returns the integrand times the flat area weight
    at each sample point; ``keep(idx, n)`` returns a mask of generation-n
    boxes whose children may still contribute, or a pair (mask, extra) where
    extra estimates everything below the dropped boxes and is added to the
    generation's term. Each box is sampled on a k x k Gauss-Legendre
    grid. The walk stops at ``max_gen``, when the frontier exceeds ``budget``,
    or when the last per-generation terms decay at a steady geometric rate.
    """
    u, gw = gauss_legendre(k)
    wbox = (gw[:, None] * gw[None, :]).ravel()
    frontier = np.array([0], dtype=np.int64)
    terms, boxes = [], []
    stopped = "max_gen"
    for n in range(0, max_gen + 1):
        L = math.ldexp(1.0, -n)
        th = np.ldexp((frontier[:, None, None] + u[None, :, None]).astype(float), -n)
        t = L * (0.5 + 0.5 * u[None, None, :])
        th, t = np.broadcast_arrays(th, t)
        vals = sample(1.0 - t.ravel(), np.mod(th.ravel(), 1.0), t.ravel())
        w = L * (0.5 * L)
        terms.append(float(np.sum(vals.reshape(-1, k * k) * wbox)) * w)
        boxes.append(int(frontier.size))
        mask = keep(frontier, n)
        if isinstance(mask, tuple):
            mask, extra = mask
            terms[-1] += extra
        if n == max_gen:
            break
        if _steady(terms, min_gen, stable_tol):
            stopped = "steady"
            break
        if _negligible(terms, min_gen):
            stopped = "negligible"
            break
        frontier = frontier[mask]
        frontier = np.sort(np.concatenate([2 * frontier, 2 * frontier + 1]))
        if frontier.size == 0:
            stopped = "empty"
            break
        if frontier.size > budget:
            stopped = "budget"
            break
    return BoxSweep(terms, [], [], boxes, stopped)


def _negligible(terms: list, min_gen: int, rel: float = 1e-15) -> bool:
    """The last three terms no longer move the sum in double precision."""
    if len(terms) < max(min_gen, 3):
        return False
    total = math.fsum(terms)
    return total > 0 and all(t <= rel * total for t in terms[-3:])


def _steady(terms: list, min_gen: int, tol: float) -> bool:
    if len(terms) < max(min_gen, 7):
        return False
    t = np.asarray(terms[-7:])
    if np.any(t <= 0):
        return False
    r = t[1:] / t[:-1]
    # compare two-step ratios to damp period-two wobble
    r2 = t[2:] / t[:-2]
    return bool(np.all(r2 < 1.0) and np.ptp(np.sqrt(r2)) < tol and np.all(r < 1.5))


def geometric_tail(terms: list, span: int = 4) -> tuple[float, float]:
    """Tail after the last term from the mean ratio of the last ``span`` steps."""
    t = np.asarray(terms, dtype=float)
    if t.size <= span or t[-1] <= 0 or t[-1 - span] <= 0:
        return math.nan, math.nan
    r = (t[-1] / t[-1 - span]) ** (1.0 / span)
    if r >= 1.0:
        return math.inf, r
    return float(t[-1] * r / (1.0 - r)), r


def besov_integral(mu: AtomicMeasure, p: float, q: float, max_gen: int = 40, k: int = 2,
                   budget: float = 6e4, full_gen: int = 10, far: float = 4.0) -> NormReport:
    """int_D |S'(z)|^q (1 - |z|^2)^(q - 1 - p) dA by dyadic top boxes, dA the
    normalized area measure.

    All boxes are visited down to ``full_gen``. Below it a box farther than
    ``far`` box widths from every atom is closed off and the column beneath
    it is integrated in closed form (see ``_column_integrals``); the rest
    are refined.
    """
    _check_p(p)
    if not (1.0 <= q <= 2.0):
        raise RangeError("need 1 <= q <= 2")
    if not len(mu):
        return NormReport(0.0, CONVERGES, "dyadic-top", [0.0], {"p": p, "q": q})
    x = mu.positions
    e = q - 1.0 - p

    def sample(r, th, t):
        # normalized area: dA = r dr dtheta / pi = 2 r dr d(turn)
        return s_mu_deriv_abs_polar(mu, r, th) ** q * (1.0 - r * r) ** e * 2.0 * r

    def keep(idx, n):
        if n < full_gen:
            return np.ones(idx.size, dtype=bool)
        L = math.ldexp(1.0, -n)
        closed = ~_near_atoms(idx, n, x, far)
        extra = 0.0
        if closed.any():
            u, gw = gauss_legendre(k)
            th = np.mod(np.ldexp(idx[closed, None] + u[None, :], -n).ravel(), 1.0)
            col = _column_integrals(mu, th, 0.5 * L, q, e).reshape(-1, k)
            extra = float(np.sum(col * gw[None, :])) * L
        return ~closed, extra

    sweep = box_sweep(sample, keep, max_gen=max_gen, k=k, budget=budget)
    return _finish(sweep, "dyadic-top", {"p": p, "q": q, "far": far})


def _column_integrals(mu: AtomicMeasure, theta: np.ndarray, T: float, q: float,
                      e: float) -> np.ndarray:
    """int_0^T |S'(r e^(i theta))|^q (1 - r^2)^e 2r dt, r = 1 - t, for theta
    far from the atoms.

    Over the column |h| stays at its boundary value and P grows linearly,
    P = b t; with (1 - r^2)^e 2r = 2 (2t)^e (1 - c t + O(t^2)), c = 1 + e/2,
    the integrand becomes 2 |h|^q (2t)^e (1 - c t) exp(-q b t).
    """
    hb = s_mu_deriv_boundary(mu, theta)
    b = poisson_polar(mu, np.full(theta.size, 1.0 - T), theta) / T
    a = q * b
    s = e + 1.0
    c = 1.0 + 0.5 * e

    def moment(s):
        # int_0^T t^(s-1) exp(-a t) dt
        with np.errstate(divide="ignore", invalid="ignore"):
            g = special.gamma(s) * special.gammainc(s, a * T) / a ** s
        return np.where(a * T < 1e-8, T ** s / s, g)

    return 2.0 * hb ** q * 2.0 ** e * (moment(s) - c * moment(s + 1.0))


def _near_atoms(idx: np.ndarray, n: int, x: np.ndarray, factor: float) -> np.ndarray:
    """Boxes whose centre is within factor * width of some atom."""
    L = math.ldexp(1.0, -n)
    mid = np.ldexp(idx.astype(float) + 0.5, -n)
    j = np.searchsorted(x, mid)
    left = x[(j - 1) % x.size]
    right = x[j % x.size]
    d = np.minimum(np.abs((mid - left + 0.5) % 1.0 - 0.5), np.abs((right - mid + 0.5) % 1.0 - 0.5))
    return d <= factor * L


def _finish(sweep: BoxSweep, method: str, meta: dict) -> NormReport:
    terms = sweep.terms
    v = classify_from_peak(terms)
    tail, ratio = geometric_tail(terms)
    total = math.fsum(terms)
    if v.status == DIVERGES or (math.isinf(tail) and sweep.stopped != "empty"):
        status, value = DIVERGES, total
    elif sweep.stopped in ("empty", "negligible"):
        status, value = CONVERGES, total
    elif math.isnan(tail):
        status, value = INCONCLUSIVE, total
    else:
        status = CONVERGES if v.status == CONVERGES or sweep.stopped == "steady" else v.status
        value = total + tail
    meta = dict(meta, partial=total, tail=tail, ratio=ratio, stopped=sweep.stopped,
                generations=len(terms), boxes=int(sum(sweep.boxes)))
    if sweep.inner:
        meta.update(inner=math.fsum(sweep.inner), outer=math.fsum(sweep.outer))
    return NormReport(value, status, method, terms, meta)


# -- raster ----------------------------------------------------------------

def raster(mu: AtomicMeasure, n_theta: int = 256, n_r: int = 64, r_min: float = 0.0,
           r_max: float = 0.999, quantity: str = "abs_s") -> list[tuple[float, float, float]]:
    """|S_mu| (or P_mu) on a polar lattice, rows (theta, r, value)."""
    if n_theta < 1 or n_r < 1 or not (0.0 <= r_min <= r_max < 1.0):
        raise RangeError("bad raster lattice")
    th = np.arange(n_theta) / n_theta
    rs = np.linspace(r_min, r_max, n_r)
    T, R = np.meshgrid(th, rs, indexing="ij")
    P = poisson_polar(mu, R.ravel(), T.ravel())
    if quantity == "abs_s":
        vals = np.exp(-P)
    elif quantity == "poisson":
        vals = P
    else:
        raise RangeError(f"unknown raster quantity {quantity!r}")
    return list(zip(T.ravel().tolist(), R.ravel().tolist(), vals.tolist()))
