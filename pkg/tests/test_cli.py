import io
import json
import math

import pytest

from carleson.cli import build_parser, main, split_bundle
from carleson.circle import MEASURE_HEADER, SET_HEADER
from carleson.errors import ParseError

SUBCOMMANDS = [["gen"], ["gen", "atoms"], ["gen", "cantor"], ["gen", "pruned"], ["bc-norm"],
               ["roberts"], ["corona"], ["area"], ["inner"], ["pde"], ["reproduce"], []]


def run(argv, capsys, monkeypatch, stdin=""):
    monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    return code, capsys.readouterr()


def gen(argv, capsys, monkeypatch):
    code, out = run(["gen"] + argv, capsys, monkeypatch)
    assert code == 0
    return out.out


@pytest.mark.parametrize("argv", SUBCOMMANDS)
def test_help_exits_zero(argv):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(argv + ["--help"])
    assert exc.value.code == 0


def test_atoms_into_hp(capsys, monkeypatch):
    text = gen(["atoms", "--n", "16", "--eps", "0.5"], capsys, monkeypatch)
    code, out = run(["inner", "--op", "hp", "--p", "0.3"], capsys, monkeypatch, text)
    assert code == 0
    rep = json.loads(out.out)
    assert rep["status"] == "converges" and rep["value"] > 0 and rep["p"] == 0.3


def test_exit_codes(capsys, monkeypatch, tmp_path):
    text = gen(["atoms", "--n", "4", "--eps", "0.5"], capsys, monkeypatch)
    assert run(["inner", "--op", "hp", "--p", "0.6"], capsys, monkeypatch, text)[0] == 4
    assert run(["inner", "--op", "hp", "-i", str(tmp_path / "none")], capsys, monkeypatch)[0] == 3
    assert run(["area"], capsys, monkeypatch, "nonsense\n")[0] == 2
    assert run(["inner", "--op", "hp-test"], capsys, monkeypatch, text)[0] == 2
    assert run(["reproduce", "no-such-suite"], capsys, monkeypatch)[0] == 6
    assert run(["area", "--depth", "60"], capsys, monkeypatch, text)[0] == 4
    with pytest.raises(SystemExit) as exc:
        main(["inner", "--op", "nope"])
    assert exc.value.code == 2


def test_bundle_split():
    m, s = split_bundle(f"{MEASURE_HEADER}\n0.1 1.0\n{SET_HEADER}\ngap 0.2 0.5\n")
    assert m.startswith(MEASURE_HEADER) and "gap" not in m
    assert s.startswith(SET_HEADER)
    with pytest.raises(ParseError):
        split_bundle("0.1 1.0\n")


def test_file_inputs(capsys, monkeypatch, tmp_path):
    text = gen(["cantor", "--A", "4", "--G", "5"], capsys, monkeypatch)
    f = tmp_path / "cantor.txt"
    f.write_text(text)
    code, out = run(["bc-norm", "--depth", "8", "-i", str(f)], capsys, monkeypatch)
    assert code == 0
    assert set(json.loads(out.out)) >= {"arc_sum", "privalov_integral"}
    code, out = run(["inner", "--op", "hp-test", "-i", str(f), "--format", "csv"],
                    capsys, monkeypatch)
    assert code == 0 and out.out.startswith("key,value\n")


def test_decompositions_strict(capsys, monkeypatch):
    text = gen(["cantor", "--A", "4", "--G", "6", "--what", "measure"], capsys, monkeypatch)
    code, out = run(["roberts", "--strict", "--gauge", "power:0.5", "--layers", "8"],
                    capsys, monkeypatch, text)
    assert code == 0 and json.loads(out.out)["check"]["conservation_ok"]
    code, out = run(["corona", "--strict", "--M", "2"], capsys, monkeypatch, text)
    assert code == 0 and json.loads(out.out)["check"]["packing"]


def test_strict_flags_divergence(capsys, monkeypatch):
    # A = 2.5 violates the q-BC threshold, so the hp-test sum keeps growing
    text = gen(["cantor", "--A", "2.5", "--G", "12"], capsys, monkeypatch)
    code, _ = run(["inner", "--op", "hp-test", "--p", "0.3"], capsys, monkeypatch, text)
    assert code == 0
    code, _ = run(["inner", "--op", "hp-test", "--p", "0.3", "--strict"], capsys, monkeypatch, text)
    assert code == 5


def test_raster_csv(capsys, monkeypatch):
    code, out = run(["inner", "--op", "raster", "--n-theta", "3", "--n-r", "2"], capsys,
                    monkeypatch, f"{MEASURE_HEADER}\n0.0 1.0\n")
    lines = out.out.splitlines()
    assert code == 0 and lines[0] == "theta,r,value" and len(lines) == 7
    th, r, v = map(float, lines[1].split(","))
    assert (th, r) == (0.0, 0.0) and v == pytest.approx(math.exp(-1))


def test_area_and_pde(capsys, monkeypatch):
    code, out = run(["area", "--sigma", "1.3"], capsys, monkeypatch, f"{MEASURE_HEADER}\n0.0 1.0\n")
    assert code == 0 and json.loads(out.out)["status"] == "converges"
    code, out = run(["pde", "restore", "--a0", "0.5", "--alpha", "0.5"], capsys, monkeypatch)
    assert code == 0 and json.loads(out.out)["converged"]
    text = gen(["cantor", "--A", "4", "--G", "5"], capsys, monkeypatch)
    code, out = run(["pde", "tents", "--alpha", "0.5", "--gamma", "1.5", "--x", "0"],
                    capsys, monkeypatch, text)
    rep = json.loads(out.out)
    assert code == 0 and rep["mu_average"]["value"] <= rep["mu_average"]["upper"]
    code, _ = run(["pde", "tents", "--alpha", "0.5", "--gamma", "3"], capsys, monkeypatch, text)
    assert code == 4


def test_reproduce_writes_tables(capsys, monkeypatch, tmp_path):
    code, out = run(["reproduce", "restoring", "--out", str(tmp_path)], capsys, monkeypatch)
    assert code == 0 and "PASS" in out.out
    assert (tmp_path / "restoring.csv").read_text().startswith("alpha")
    assert (tmp_path / "summary.txt").exists()
