import json
import random
from importlib.resources import files

import pytest

from conftest import fixture_graph
from twodd.cli import main
from twodd.digraph import format_graph_text, graph_from_json
from twodd.enumeration import random_2dd
from twodd.factors import is_hamiltonian, open_routes
from twodd.permset import parse_permset_text, residue


def data(name):
    return str(files("twodd") / "data" / f"{name}.graph")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decompose_json_round_trip(capsys):
    code, out, _ = run(capsys, "decompose", data("g5"), "--format", "json")
    assert code == 0
    g = graph_from_json(json.loads(out))
    assert sorted(g.arcs) == sorted(fixture_graph("g5").arcs)
    code, out, _ = run(capsys, "decompose", data("g5"))
    assert code == 0 and out.count("AC ") == len(fixture_graph("g5").acs)
    code, out, _ = run(capsys, "decompose", data("clean_ac"), "--format", "dot")
    assert code == 0 and out.startswith("digraph")


def test_factors_and_routes(capsys):
    code, out, _ = run(capsys, "factors", data("g1"))
    assert code == 0
    assert len(out.splitlines()) == 2 ** len(fixture_graph("g1").acs)
    code, out, _ = run(capsys, "routes", data("ga"))
    assert code == 0
    assert parse_permset_text(out) == open_routes(fixture_graph("ga")).routes


def test_residue_from_graph_and_set(capsys, tmp_path):
    code, out, _ = run(capsys, "residue", data("ga"))
    assert code == 0
    expected = residue(open_routes(fixture_graph("ga")).routes)
    assert parse_permset_text(out) == expected
    path = tmp_path / "p.set"
    run(capsys, "routes", data("ga"), "-o", str(path))
    code, out, _ = run(capsys, "residue", "--permset", str(path))
    assert code == 0 and parse_permset_text(out) == expected
    assert run(capsys, "residue")[0] == 2


def test_equiv(capsys, tmp_path):
    a, b = tmp_path / "a.set", tmp_path / "b.set"
    a.write_text("n=4\n(1 4)\n")
    b.write_text("n=4\n(2 3)\n")
    code, out, _ = run(capsys, "equiv", str(a), str(b))
    assert code == 0 and "x = " in out
    c = tmp_path / "c.set"
    c.write_text("n=4\n(1 2 3)\n(1 2)\n")
    assert run(capsys, "equiv", str(a), str(c))[0] == 1
    code, _, _ = run(capsys, "equiv", data("ga"), data("gb"))
    assert code == 0


def test_splice(capsys):
    code, out, err = run(capsys, "splice", data("g1"), data("g2"), "--hamiltonian")
    assert code in (0, 1)
    assert err.strip() in ("hamiltonian", "non-hamiltonian")
    assert out.startswith("vertices") or "vertices" in out


def test_check_and_verify(capsys, tmp_path):
    cert = tmp_path / "g5.cert"
    code, out, _ = run(capsys, "check", data("g5"), "-o", str(cert))
    assert code == 0 and out.strip() == "NON_HAMILTONIAN"
    code, out, _ = run(capsys, "verify-cert", data("g5"), str(cert))
    assert code == 0 and out.strip() == "valid"
    d = json.loads(cert.read_text())
    d["steps"][0]["routes_P"] = d["steps"][0]["routes_P"][1:]
    cert.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify-cert", data("g5"), str(cert))
    assert code == 1 and out.startswith("invalid")


def test_check_hamiltonian_graph(capsys, tmp_path):
    rng = random.Random(3)
    g = next(h for h in iter(lambda: random_2dd(4, rng), None) if is_hamiltonian(h))
    path = tmp_path / "h.graph"
    path.write_text(format_graph_text(g))
    code, out, _ = run(capsys, "check", str(path))
    assert code == 0 and json.loads(out)["verdict"] == "HAMILTONIAN"
    # without brute force nothing can certify a Hamiltonian graph
    code, out, _ = run(capsys, "check", str(path), "--no-brute-force")
    assert code == 1 and json.loads(out)["verdict"] == "UNDECIDED"
    assert run(capsys, "check", data("g1"))[0] == 2


def test_reduce(capsys):
    code, _, err = run(capsys, "reduce", data("g5"))
    assert code == 1 and "no reduction" in err


def test_generate_and_census(capsys, tmp_path):
    out_file = tmp_path / "fam.txt"
    code, out, _ = run(capsys, "generate", "--acs", "2", "--saturated", "2", "-o", str(out_file))
    assert code == 0
    count = int(out.strip())
    assert len((tmp_path / "fam.txt.index").read_text().splitlines()) == count
    assert out_file.read_text().count("# graph") == count
    code, out, _ = run(capsys, "census", "--acs", "2", "--saturated", "2", "--analyses", "hamiltonian")
    assert code == 0
    rows = out.splitlines()[1:]
    assert sum(int(r.split("\t")[-1]) for r in rows) == count


def test_sharded_census(capsys, tmp_path):
    work = tmp_path / "work"
    args = ["census", "--acs", "2", "--dirty", "--allow-disconnected", "--work-dir", str(work)]
    assert run(capsys, *args)[0] == 2
    code, sharded, _ = run(capsys, *args, "--long-run")
    assert code == 0
    direct = run(capsys, *args[:-2])[1]
    assert sharded == direct


@pytest.mark.parametrize("argv", [
    ["census", "--acs", "7"],
    ["generate", "--acs", "5", "--arcs-per-ac", "8", "-o", "unused"],
])
def test_caps_exit_three(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_env_cap(capsys, monkeypatch):
    monkeypatch.setenv("TWODD_MAX_ACS", "2")
    assert run(capsys, "factors", data("g5"))[0] == 3
    monkeypatch.setenv("TWODD_MAX_ACS", "lots")
    assert run(capsys, "factors", data("g5"))[0] == 2


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "check", str(tmp_path / "missing.graph"))[0] == 2
    bad = tmp_path / "bad.graph"
    bad.write_text("vertices 3\n1 2\n")
    assert run(capsys, "check", str(bad))[0] == 2
    assert run(capsys, "--help")[0] == 0
