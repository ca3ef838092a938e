"""H^p growth of n equally spaced atoms of mass n^(eps-1).

Prints ||S_mu||_p^p for n = 2^k and the fitted log-log slope, which should
approach p * eps.
"""
import argparse

from carleson.constructions import equally_spaced_atoms
from carleson.inner import hp_norm_boundary
from carleson.numerics import loglog_slope

ap = argparse.ArgumentParser()
ap.add_argument("--eps", type=float, default=0.5)
ap.add_argument("--p", type=float, default=0.3)
ap.add_argument("--kmax", type=int, default=10)
a = ap.parse_args()

ns, vals = [], []
for k in range(4, a.kmax + 1):
    n = 2 ** k
    v = hp_norm_boundary(equally_spaced_atoms(n, a.eps), a.p).value
    ns.append(n)
    vals.append(v)
    print(f"n={n:6d}  norm^p={v:.6g}")
print(f"slope {loglog_slope(ns, vals):.4f}  (target {a.p * a.eps:.4f})")
