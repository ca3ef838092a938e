"""Command line entry point.

Measures and closed sets travel between subcommands as text, so
``carleson gen atoms --n 16 --eps 0.5 | carleson inner --op hp --p 0.3``
works. A stream may carry a measure section, a closed-set section, or both.

Exit codes: 2 parse error, 3 missing file, 4 parameter out of range,
5 invariant violation under --strict, 6 unknown suite.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bcnorm, corona, inner, pde, roberts
from .circle import (GENERATION_CAP, MEASURE_HEADER, SET_HEADER, format_closed_set,
                     format_measure, parse_closed_set, parse_measure)
from .constructions import CantorSpec, cantor_measure, cantor_set, equally_spaced_atoms, pruned_cantor
from .errors import CarlesonError, GridError, ParseError, RangeError
from .gauge import build_grid, parse_gauge
from .suites import SUITES, run_suite

EXIT_PARSE, EXIT_MISSING, EXIT_RANGE, EXIT_STRICT, EXIT_SUITE = 2, 3, 4, 5, 6


class StrictViolation(CarlesonError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    gauge: str | None = None
    tolerances: dict = field(default_factory=dict)
    depth_caps: dict = field(default_factory=dict)
    fmt: str = "json"
    strict: bool = False

    def validate(self) -> None:
        for k, v in self.depth_caps.items():
            if v is not None and not (0 <= v <= GENERATION_CAP):
                raise RangeError(f"{k} must lie in [0, {GENERATION_CAP}]")
        if self.fmt not in ("json", "csv"):
            raise RangeError("format is json or csv")


# -- io ----------------------------------------------------------------------

def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    return p.read_text()


def split_bundle(text: str) -> tuple[str | None, str | None]:
    """Cut a stream into its measure and closed-set sections."""
    sections, cur = {}, None
    for line in text.splitlines():
        s = line.strip()
        if s in (MEASURE_HEADER, SET_HEADER):
            cur = s
            sections.setdefault(cur, [])
        if cur is None:
            if s and not s.startswith("#"):
                raise ParseError("input has no measure or closed-set header")
            continue
        sections[cur].append(line)
    join = lambda k: "\n".join(sections[k]) + "\n" if k in sections else None
    return join(MEASURE_HEADER), join(SET_HEADER)


def load_inputs(paths: list, need_mu=True, need_set=False):
    mu = E = None
    for path in paths or ["-"]:
        m_txt, s_txt = split_bundle(read_text(path))
        if m_txt is not None:
            mu = parse_measure(m_txt)
        if s_txt is not None:
            E = parse_closed_set(s_txt)
    if need_mu and mu is None:
        raise ParseError("a measure section is required")
    if need_set and E is None:
        raise ParseError("a closed-set section is required")
    return mu, E


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def emit(obj, fmt: str, out=None) -> None:
    out = out or sys.stdout
    obj = _plain(obj)
    if fmt == "json":
        json.dump(obj, out, indent=2)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        keys = list(obj[0])
        w.writerow(keys)
        for row in obj:
            w.writerow([row.get(k) for k in keys])
        return
    w.writerow(["key", "value"])
    for k, v in obj.items():
        if isinstance(v, (list, dict)):
            v = json.dumps(v)
        w.writerow([k, v])


def write_raster(rows, out=None) -> None:
    out = out or sys.stdout
    out.write("theta,r,value\n")
    for th, r, v in rows:
        out.write(f"{th!r},{r!r},{v!r}\n")


# -- commands ----------------------------------------------------------------

def cmd_gen(a, cfg):
    if a.kind == "atoms":
        sys.stdout.write(format_measure(equally_spaced_atoms(a.n, a.eps)))
        return None
    if a.kind == "cantor":
        spec = CantorSpec(a.A, a.G)
        E, _ = cantor_set(spec)
        mu = cantor_measure(spec)
    else:
        pc = pruned_cantor(a.p, a.alpha_exp, a.G)
        E, mu = pc.E, pc.mu
    if a.what in ("measure", "both"):
        sys.stdout.write(format_measure(mu))
    if a.what in ("set", "both"):
        sys.stdout.write(format_closed_set(E))
    return None


def cmd_bc_norm(a, cfg):
    _, E = load_inputs(a.input, need_mu=False, need_set=True)
    return bcnorm.comparability_report(E, parse_gauge(a.gauge), a.depth).to_dict()


def cmd_roberts(a, cfg):
    mu, _ = load_inputs(a.input)
    g = parse_gauge(a.gauge)
    grid = build_grid(g, a.j0 + a.layers)
    d = roberts.roberts_decompose(mu, g, grid, C=a.C, j0=a.j0, max_layers=a.layers)
    chk = d.check()
    out = d.to_dict()
    out["check"] = chk
    if cfg.strict and not (chk["layer_bound_ok"] and chk["conservation_ok"] and chk["refines"]):
        raise StrictViolation("Roberts decomposition fails its own checks")
    return out


def cmd_corona(a, cfg):
    mu, _ = load_inputs(a.input)
    d = corona.corona_decompose(mu, a.M, depth=a.depth, light_ratio_divisor=a.divisor)
    out = d.to_dict() if a.nodes else d.summary()
    chk = corona.check_decomposition(d)
    out["check"] = chk
    out["extracted_sets"] = [s.to_dict() for s in corona.extract_bc_sets(d)]
    if cfg.strict and not all(chk[k] for k in ("alternation", "maximality", "packing", "coverage_ok")):
        raise StrictViolation("corona decomposition fails its own checks")
    return out


def cmd_area(a, cfg):
    mu, _ = load_inputs(a.input)
    thr = a.threshold if a.threshold is not None else corona.threshold_for_level(a.level)
    return corona.sublevel_area_integral(mu, thr, a.sigma, depth=a.depth,
                                         bracket=a.bracket).to_dict()


def cmd_inner(a, cfg):
    mu, E = load_inputs(a.input, need_set=a.op == "hp-test")
    if a.op == "hp":
        return inner.hp_norm_boundary(mu, a.p).to_dict()
    if a.op == "hp-test":
        rep = inner.hp_test_sum(mu, E, a.p)
        if cfg.strict and rep.diverging:
            raise StrictViolation("hp-test sum diverges")
        return rep.to_dict()
    if a.op == "nev":
        return inner.nevanlinna_norm(mu).to_dict()
    if a.op == "besov":
        return inner.besov_integral(mu, a.p, a.q).to_dict()
    write_raster(inner.raster(mu, a.n_theta, a.n_r, a.r_min, a.r_max, a.quantity))
    return None


def cmd_pde(a, cfg):
    if a.task == "maximal":
        prm = pde.params_of_p(a.p)
        sol = pde.maximal_solution_radial(a.p)
        out = sol.to_dict()
        out.update(alpha=prm.alpha, C_alpha=prm.C_alpha)
        return out
    if a.task == "restore":
        return pde.restoring_iteration(a.a0, a.alpha, max_iter=a.max_iter, tol=a.tol).to_dict()
    mu, E = load_inputs(a.input, need_set=True)
    conf = pde.TentConfig(a.gamma, a.psi, a.beta)
    conf.validate(a.alpha)
    c1 = pde.condition1_sum(E, mu, a.alpha, a.beta)
    avg = pde.mu_average_condition2(E, mu, a.alpha, conf)
    h = pde.tent_heights(E, mu, a.alpha, conf)
    out = {"heights_max": float(h.max()) if h.size else 0.0,
           "heights_sum": float(h.sum()), "condition1": c1.to_dict(),
           "mu_average": avg.to_dict()}
    if a.x is not None:
        out["condition2_at_x"] = pde.condition2_sum(E, mu, a.alpha, a.x, conf)
    if cfg.strict and not c1.holds:
        raise StrictViolation("Hoelder split of condition (1) fails")
    return out


def cmd_reproduce(a, cfg):
    if a.name not in SUITES:
        raise KeyError(a.name)
    res = run_suite(a.name)
    if a.out:
        d = Path(a.out)
        d.mkdir(parents=True, exist_ok=True)
        for tname, rows in res.tables.items():
            with open(d / f"{tname}.csv", "w") as fh:
                emit(rows, "csv", fh)
        (d / "summary.txt").write_text(res.summary() + "\n")
    print(res.summary())
    for c in res.checks:
        print(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    if cfg.strict and not res.passed:
        raise StrictViolation(f"suite {a.name} failed")
    return None


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--strict", action="store_true",
                        help="exit 5 when a checked invariant fails")
    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--input", "-i", action="append",
                     help="input file (repeatable, '-' for stdin; default stdin)")

    ap = argparse.ArgumentParser(prog="carleson", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate example measures and sets")
    gs = g.add_subparsers(dest="kind", required=True)
    p = gs.add_parser("atoms", parents=[common], help="n equal atoms of mass n^-(2-eps)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p = gs.add_parser("cantor", parents=[common], help="symmetric Cantor set and measure")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--G", type=int, required=True)
    p.add_argument("--what", choices=("measure", "set", "both"), default="both")
    p = gs.add_parser("pruned", parents=[common], help="pruned Cantor construction")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha-exp", type=float, required=True)
    p.add_argument("--G", type=int, required=True)
    p.add_argument("--what", choices=("measure", "set", "both"), default="both")

    p = sub.add_parser("bc-norm", parents=[common, src], help="four comparable BC quantities")
    p.add_argument("--gauge", default="entropy")
    p.add_argument("--depth", type=int, default=12)

    p = sub.add_parser("roberts", parents=[common, src], help="Roberts layer decomposition")
    p.add_argument("--gauge", default="entropy")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--j0", type=int, default=0)
    p.add_argument("--layers", type=int, default=5)

    p = sub.add_parser("corona", parents=[common, src], help="heavy/light corona forest")
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--depth", type=int, default=24)
    p.add_argument("--divisor", type=float, default=100.0)
    p.add_argument("--nodes", action="store_true", help="list every node")

    p = sub.add_parser("area", parents=[common, src], help="weighted area of a sublevel set")
    p.add_argument("--level", type=float, default=0.5, help="level c of |S_mu|")
    p.add_argument("--threshold", type=float, help="Poisson threshold (overrides --level)")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--depth", type=int, default=GENERATION_CAP)
    p.add_argument("--bracket", action="store_true")

    p = sub.add_parser("inner", parents=[common, src], help="singular inner function norms")
    p.add_argument("--op", choices=("hp", "hp-test", "nev", "besov", "raster"), required=True)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--n-theta", type=int, default=256)
    p.add_argument("--n-r", type=int, default=64)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=0.999)
    p.add_argument("--quantity", choices=("abs_s", "poisson"), default="abs_s")

    p = sub.add_parser("pde", parents=[common, src], help="maximal solution, restoring map, tents")
    p.add_argument("task", choices=("maximal", "restore", "tents"))
    p.add_argument("--p", type=float, default=5.0)
    p.add_argument("--a0", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--gamma", type=float, default=1.5)
    p.add_argument("--psi", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--x", type=float, help="point of E for the pointwise sum")

    p = sub.add_parser("reproduce", parents=[common], help="run a scripted experiment")
    p.add_argument("name", help="one of: " + ", ".join(SUITES))
    p.add_argument("--out", help="directory for CSV tables and summary")
    return ap


COMMANDS = {"gen": cmd_gen, "bc-norm": cmd_bc_norm, "roberts": cmd_roberts,
            "corona": cmd_corona, "area": cmd_area, "inner": cmd_inner,
            "pde": cmd_pde, "reproduce": cmd_reproduce}


def _config(a) -> RunConfig:
    caps = {k: getattr(a, k) for k in ("depth",) if getattr(a, k, None) is not None}
    tols = {k: getattr(a, k) for k in ("tol",) if getattr(a, k, None) is not None}
    return RunConfig(a.command, getattr(a, "input", None) or [], getattr(a, "gauge", None),
                     tols, caps, a.format, a.strict)


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        cfg = _config(a)
        cfg.validate()
        out = COMMANDS[a.command](a, cfg)
        if out is not None:
            emit(out, cfg.fmt)
        return 0
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"no such file: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (RangeError, GridError) as exc:
        print(f"out of range: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except StrictViolation as exc:
        print(f"strict: {exc}", file=sys.stderr)
        return EXIT_STRICT
    except KeyError as exc:
        if a.command != "reproduce":
            raise
        print(f"unknown suite {exc.args[0]!r}; known: {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_SUITE
