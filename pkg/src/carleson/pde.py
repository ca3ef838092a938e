"""The semilinear equation  Lap u = u^p (u > 0)  in the disk and half-plane.

* exponents: alpha = (p - 3)/(p - 1); on the upper half-plane the maximal
  solution is C y^(alpha - 1) with C^(p-1) = (alpha - 1)(alpha - 2)
* the radial maximal solution on the unit disk by shooting on u(0)
* the scalar restoring map b(a) for constant-data extensions in the half-plane
* tent heights and the two sums controlling the special sawtooth domain
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .circle import AtomicMeasure, ClosedSet, circular_distance
from .errors import RangeError, ShootingError
from .inner import gap_points, poisson_polar

BLOWUP = 1e12


@dataclass(frozen=True)
class PdeParams:
    p: float
    alpha: float
    C_alpha: float

    def residual(self, y) -> np.ndarray:
        """u'' - u^p for u = C y^(alpha-1), relative to u^p."""
        y = np.asarray(y, dtype=float)
        a, C = self.alpha, self.C_alpha
        u = C * y ** (a - 1.0)
        upp = C * (a - 1.0) * (a - 2.0) * y ** (a - 3.0)
        return (upp - u ** self.p) / u ** self.p

    def u_halfplane(self, y):
        return self.C_alpha * np.asarray(y, dtype=float) ** (self.alpha - 1.0)


def params_of_p(p: float) -> PdeParams:
    if not p > 1:
        raise RangeError("need p > 1")
    alpha = (p - 3.0) / (p - 1.0)
    # matching y^(alpha-3) = y^(p(alpha-1)) fixes alpha; the coefficients give C
    C = ((alpha - 1.0) * (alpha - 2.0)) ** (1.0 / (p - 1.0))
    return PdeParams(p, alpha, C)


# -- radial shooting -------------------------------------------------------

@dataclass
class RadialSolution:
    p: float
    u0: float
    blowup_radius: float
    r: np.ndarray
    u: np.ndarray
    normalized: np.ndarray  # u (1 - r)^(1 - alpha)
    iterations: int

    def to_dict(self) -> dict:
        return {"p": self.p, "u0": self.u0, "blowup_radius": self.blowup_radius,
                "iterations": self.iterations,
                "samples": [{"r": float(a), "u": float(b), "normalized": float(c)}
                            for a, b, c in zip(self.r, self.u, self.normalized)]}


def _rhs(p):
    def f(r, y):
        u, v = y
        return [v, max(u, 0.0) ** p - v / r]
    return f


def _start(u0: float, p: float, r0: float):
    # series at the origin: u = u0 + u0^p r^2 / 4 + ...
    return [u0 + u0 ** p * r0 * r0 / 4.0, u0 ** p * r0 / 2.0]


def shoot(u0: float, p: float, r_end: float = 1.0, rtol: float = 1e-10, dense: bool = False):
    """Integrate from the origin; returns (blew_up, r_reached, solution)."""
    r0 = 1e-8
    ev = lambda r, y: y[0] - BLOWUP  # noqa: E731
    ev.terminal = True
    ev.direction = 1
    sol = solve_ivp(_rhs(p), (r0, r_end), _start(u0, p, r0), method="RK45", rtol=rtol,
                    atol=1e-12, events=ev, dense_output=dense)
    if sol.status == 1:
        return True, float(sol.t_events[0][0]), sol
    if sol.status == -1:
        # the step size collapsed: u is exploding faster than doubles can follow
        return True, float(sol.t[-1]), sol
    return False, float(sol.t[-1]), sol


def blowup_radius(u0: float, p: float, r_max: float = 4.0) -> float:
    hit, r, _ = shoot(u0, p, r_max)
    return r if hit else math.inf


def maximal_solution_radial(p: float, r_grid=None, tol: float = 1e-10,
                            max_iter: int = 200) -> RadialSolution:
    """Radial maximal solution: bisection on u(0) until blow-up happens at r = 1.

    The returned samples come from the largest u(0) that still survives to
    r = 1, so they approach the maximal solution from below.
    """
    prm = params_of_p(p)
    if r_grid is None:
        r_grid = 1.0 - np.logspace(-1, -5, 9)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any((r_grid < 0) | (r_grid >= 1)):
        raise RangeError("sample radii must lie in [0, 1)")
    lo, hi = 1e-3, 1.0
    for _ in range(200):
        if not shoot(lo, p)[0]:
            break
        lo /= 2.0
    else:
        raise ShootingError("no surviving initial value found")
    for _ in range(200):
        if shoot(hi, p)[0]:
            break
        hi *= 2.0
    else:
        raise ShootingError("no blowing-up initial value found")
    it = 0
    while (hi - lo) > tol * hi and it < max_iter:
        mid = 0.5 * (lo + hi)
        if shoot(mid, p)[0]:
            hi = mid
        else:
            lo = mid
        it += 1
    if (hi - lo) > tol * hi:
        raise ShootingError("bisection did not converge")
    R = blowup_radius(hi, p)
    _, _, sol = shoot(lo, p, 1.0, dense=True)
    u = np.where(r_grid <= 1e-8, lo, sol.sol(np.maximum(r_grid, 1e-8))[0])
    norm = u * (1.0 - r_grid) ** (1.0 - prm.alpha)
    return RadialSolution(p, lo, R, r_grid, u, norm, it)


def harnack_ratio(p: float, sol: RadialSolution, mass: float = 1.0) -> np.ndarray:
    """2 mass / (1 - r) divided by u_max(r): bounded when p <= 3, since then
    (1 - r)^(alpha - 1) grows at least as fast as any Poisson integral."""
    return 2.0 * mass / (1.0 - sol.r) / sol.u


# -- restoring map ---------------------------------------------------------

def restoring_constant(a: float, alpha: float) -> float:
    """b = (1 + a^(1/(alpha-1)))^(alpha-1) / 2^(alpha-1).

    Constant data a*C y0^(alpha-1) on the line y = y0 extends to
    C (y + c)^(alpha-1); b is its ratio to the maximal solution at y = 2 y0.
    """
    if not (0.0 < a <= 1.0):
        raise RangeError("need 0 < a <= 1")
    if not (0.0 < alpha < 1.0):
        raise RangeError("need 0 < alpha < 1")
    if a == 1.0:
        return 1.0
    e = alpha - 1.0
    return (1.0 + a ** (1.0 / e)) ** e / 2.0 ** e


@dataclass
class RestoringTrajectory:
    values: list
    converged: bool
    steps: int

    def to_dict(self) -> dict:
        return {"converged": self.converged, "steps": self.steps,
                "final": self.values[-1], "head": self.values[:10]}


def restoring_iteration(a0: float, alpha: float, max_iter: int = 100_000,
                        tol: float = 1e-6) -> RestoringTrajectory:
    if not (0.0 < a0 <= 1.0):
        raise RangeError("need 0 < a0 <= 1")
    vals = [a0]
    a = a0
    steps = 0
    while 1.0 - a > tol and steps < max_iter:
        a = restoring_constant(a, alpha)
        vals.append(a)
        steps += 1
    return RestoringTrajectory(vals, 1.0 - a <= tol, steps)


# -- tents -----------------------------------------------------------------

@dataclass(frozen=True)
class TentConfig:
    gamma: float
    psi: float = 1.0
    beta: float = 0.0

    def validate(self, alpha: float) -> None:
        if not (0.0 < alpha < 1.0):
            raise RangeError("tents need 0 < alpha < 1 (p > 3)")
        if not (1.0 < self.gamma < 1.0 / (1.0 - alpha)):
            raise RangeError("need 1 < gamma < 1/(1 - alpha)")
        if not (0.0 < self.psi <= 1.0):
            raise RangeError("need 0 < psi <= 1")
        if not self.beta <= alpha:
            raise RangeError("need beta <= alpha")


def tent_profile(t, gamma: float):
    """(1 - |2t - 1|)^gamma: equals 1 at t = 1/2, stays under the hat
    1 - 2|t - 1/2| and behaves like t^gamma, (1 - t)^gamma at the ends."""
    t = np.asarray(t, dtype=float)
    return np.clip(1.0 - np.abs(2.0 * t - 1.0), 0.0, 1.0) ** gamma


def _check_support(E: ClosedSet, mu: AtomicMeasure) -> None:
    if len(mu) and not np.all(E.contains(mu.positions)):
        raise RangeError("measure is not supported on E")


def tent_heights(E: ClosedSet, mu: AtomicMeasure, alpha: float,
                 config: TentConfig | None = None) -> np.ndarray:
    """psi * min(|I|, |I|^alpha / u(z_I)) for each complementary arc I."""
    _check_support(E, mu)
    psi = 1.0 if config is None else config.psi
    L = E.gap_len
    r, th = gap_points(E)
    u = poisson_polar(mu, r, th)
    with np.errstate(divide="ignore"):
        h = np.minimum(L, np.where(u > 0, L ** alpha / u, np.inf))
    return psi * h


@dataclass
class Condition1:
    raw_sum: float
    holder_factor_1: float
    holder_factor_2: float
    lam: float
    delta: float
    terms: np.ndarray

    @property
    def holds(self) -> bool:
        return self.raw_sum <= self.holder_factor_1 * self.holder_factor_2 * (1 + 1e-12)

    def to_dict(self) -> dict:
        return {"raw_sum": self.raw_sum, "holder_factor_1": self.holder_factor_1,
                "holder_factor_2": self.holder_factor_2, "lambda": self.lam,
                "delta": self.delta, "holder_holds": self.holds}


def holder_lambda(alpha: float, beta: float) -> float:
    return alpha * (1.0 - alpha) / (1.0 - beta)


def condition1_sum(E: ClosedSet, mu: AtomicMeasure, alpha: float, beta: float) -> Condition1:
    """sum |I|^(a^2 - a + 1) u(z_I)^(1 - a) and its Hoelder split with exponents
    1/lambda and 1/(1 - lambda), lambda = a (1 - a)/(1 - beta)."""
    if not (0.0 < alpha < 1.0):
        raise RangeError("need 0 < alpha < 1")
    if not beta < alpha:
        raise RangeError("need beta < alpha")
    _check_support(E, mu)
    lam = holder_lambda(alpha, beta)
    delta = (1.0 - alpha) / (1.0 - lam)
    L = E.gap_len
    r, th = gap_points(E)
    u = poisson_polar(mu, r, th)
    terms = L ** (alpha * alpha - alpha + 1.0) * u ** (1.0 - alpha)
    f1 = math.fsum(L ** ((alpha * (alpha - 1.0) + lam) / lam)) ** lam
    f2 = math.fsum(L * u ** delta) ** (1.0 - lam)
    return Condition1(math.fsum(terms), f1, f2, lam, delta, terms)


def _dist_to_middle_half(x: float, E: ClosedSet) -> np.ndarray:
    """Circular distance from x to the middle half of every complementary arc."""
    a = E.gap_left + 0.25 * E.gap_len
    b = E.gap_left + 0.75 * E.gap_len
    inside = np.mod(x - a, 1.0) <= (b - a)
    d = np.minimum(circular_distance(a, x), circular_distance(b, x))
    return np.where(inside, 0.0, d)


def condition2_sum(E: ClosedSet, mu: AtomicMeasure, alpha: float, x: float,
                   config: TentConfig | None = None) -> float:
    """sum over gaps of h(I) |I| / dist(x, I/2)^2 for a point x of E."""
    if not E.contains(np.array([x]))[0]:
        raise RangeError("x must lie in E")
    h = tent_heights(E, mu, alpha, config)
    d = _dist_to_middle_half(x, E)
    return math.fsum(h * E.gap_len / (d * d))


@dataclass
class MuAverage:
    value: float
    upper: float
    bracket_max: float
    brackets: np.ndarray

    def to_dict(self) -> dict:
        return {"value": self.value, "upper": self.upper, "bracket_max": self.bracket_max}


def mu_average_condition2(E: ClosedSet, mu: AtomicMeasure, alpha: float,
                          config: TentConfig | None = None) -> MuAverage:
    """int sum_I h(I)|I|/dist(x, I/2)^2 dmu(x), and the rearranged upper bound
    sum_I |I|^alpha * [ u(z_I)^-1 int |I| / dist(x, I/2)^2 dmu(x) ] whose bracket
    is reported explicitly."""
    _check_support(E, mu)
    h = tent_heights(E, mu, alpha, config)
    L = E.gap_len
    r, th = gap_points(E)
    u = poisson_polar(mu, r, th)
    integral = np.zeros(L.size)
    for x, m in zip(mu.positions, mu.masses):
        d = _dist_to_middle_half(float(x), E)
        integral += m * L / (d * d)
    with np.errstate(divide="ignore", invalid="ignore"):
        brackets = np.where(u > 0, integral / u, 0.0)
    value = math.fsum(h * integral) if L.size else 0.0
    psi = 1.0 if config is None else config.psi
    upper = psi * math.fsum(L ** alpha * brackets)
    return MuAverage(value, upper, float(brackets.max()) if brackets.size else 0.0, brackets)
