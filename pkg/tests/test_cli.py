import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from cgident.cli import main
from cgident.graph import read_graph

DATA = Path(__file__).parent / "data"


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_round_robin(capsys):
    code, out, _ = _run(["simulate", "--protocol", "ciw_n", "--n", "8", "--graph", "complete",
                         "--schedule", "round_robin", "--seed", "1"], capsys)
    rec = json.loads(out)[0]
    assert code == 0 and rec["rounds_to_stabilize"] <= 19


def test_simulate_negative_ring(capsys):
    code, out, _ = _run(["simulate", "--protocol", "ciw_n", "--n", "8", "--graph",
                         "directed_ring", "--mode", "negative", "--no-checks"], capsys)
    rec = json.loads(out)[0]
    assert code == 0 and rec["phase4_sightings"] == 0 and "yes" not in rec["final_outputs"]


@pytest.mark.parametrize("args", [
    ["simulate", "--protocol", "ciw_nk", "--n", "4"],
    ["simulate", "--protocol", "ciw_nk", "--n", "4", "--k", "5"],
    ["simulate", "--protocol", "ciw_n", "--n", "4", "--k", "2"],
    ["simulate", "--protocol", "ciw_n", "--n", "1"],
    ["simulate", "--protocol", "ciw_n", "--n", "4", "--graph", "nosuchfile"],
    ["sweep", "--protocol", "ciw_n", "--sizes", ""],
    ["sweep", "--protocol", "ciw_nk", "--sizes", "8"],
    ["simulate"],
    ["frobnicate"],
])
def test_usage_errors(args, capsys):
    assert main(args) == 2


def test_simulate_max_steps_fail(capsys):
    code, out, _ = _run(["simulate", "--protocol", "ciw_n", "--n", "8", "--max-steps", "3"],
                        capsys)
    assert code == 1 and json.loads(out)[0]["interactions_to_stabilize"] == "not observed"


def test_simulate_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        main(["simulate", "--protocol", "cig", "--n", "5", "--seed", "3", "--trials", "3",
              "--out", str(f)])
    assert a.read_bytes() == b.read_bytes()


def test_sweep_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        assert main(["sweep", "--protocol", "ciw_nk", "--sizes", "6", "--ks", "1,2,3",
                     "--trials", "4", "--out", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 4


def test_modelcheck(capsys):
    code, out, _ = _run(["modelcheck", "--protocol", "ciw_n", "--n", "2"], capsys)
    v = json.loads(out)
    assert code == 0 and v["solves"] is True and v["reachable_count"] > 0


def test_modelcheck_graph_file(capsys):
    code, out, _ = _run(["modelcheck", "--protocol", "ciw_n", "--graph",
                         str(DATA / "k3.graph")], capsys)
    assert code == 0 and json.loads(out)["n"] == 3


def test_modelcheck_wrong_expectation(capsys):
    code, out, _ = _run(["modelcheck", "--protocol", "ciw_n", "--n", "2", "--expected", "no"],
                        capsys)
    assert code == 1 and "witness_path" in json.loads(out)


def test_modelcheck_too_large(capsys):
    code, _, err = _run(["modelcheck", "--protocol", "cig", "--n", "3", "--cap", "10"], capsys)
    assert code == 3 and "too large" in err


def test_transform(tmp_path, capsys):
    src = tmp_path / "k2.graph"
    src.write_text("2\n0 1\n1 0\n")
    out = tmp_path / "fk2.graph"
    code, text, _ = _run(["transform", "--in", str(src), "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(text) == {"n": 4, "arcs": 8, "is_complete": False}
    assert read_graph(out).m == 8


def test_transform_k3(tmp_path, capsys):
    out = tmp_path / "f.graph"
    code, text, _ = _run(["transform", "--in", str(DATA / "k3.graph"), "--out", str(out)],
                         capsys)
    assert code == 0 and json.loads(text)["arcs"] == 20


def test_mirror_demo(capsys):
    code, out, _ = _run(["mirror-demo", "--protocol", "ciw_n", "--n", "2", "--steps",
                         "10000"], capsys)
    res = json.loads(out)
    assert code == 0 and res["mirror_invariant_held"] and res["image_all_yes"]


def test_invariant_trace_written(tmp_path, monkeypatch, capsys):
    import cgident.cli as cli
    from cgident.engine import InvariantViolation

    def boom(*a, **k):
        raise InvariantViolation({"step": 4, "arc": [0, 1], "messages": ["x"]})

    monkeypatch.setattr(cli, "run", boom)
    out = tmp_path / "r.json"
    code = main(["simulate", "--protocol", "ciw_n", "--n", "3", "--out", str(out)])
    assert code == 1
    assert json.loads(Path(str(out) + ".trace.json").read_text())["step"] == 4


def test_console_entry_point():
    exe = shutil.which("cgident")
    cmd = [exe] if exe else [sys.executable, "-m", "cgident.cli"]
    r = subprocess.run(cmd + ["modelcheck", "--protocol", "ciw_n", "--n", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["solves"]
