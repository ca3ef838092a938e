"""Sublevel area integral at level log 2 along a family of measures.

Shows how the weighted area of {P_mu > log 2} grows for n equally spaced
atoms, the quantity whose divergence mirrors the Besov integral.
"""
import argparse
import math

from carleson.constructions import equally_spaced_atoms
from carleson.corona import sublevel_area_integral

ap = argparse.ArgumentParser()
ap.add_argument("--eps", type=float, default=0.9)
ap.add_argument("--sigma", type=float, default=1.3)
ap.add_argument("--kmin", type=int, default=6)
ap.add_argument("--kmax", type=int, default=8)
a = ap.parse_args()

for k in range(a.kmin, a.kmax + 1):
    n = 2 ** k
    rep = sublevel_area_integral(equally_spaced_atoms(n, a.eps), math.log(2.0), sigma=a.sigma)
    print(f"n={n:5d}  area={rep.value:.5g}")
