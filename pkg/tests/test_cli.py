import json
import subprocess
import sys
from collections import deque
from math import factorial

import numpy as np
import pytest
from scipy import io as spio

from cayleygrowth.catalog import catalog
from cayleygrowth.cli import main, parse_bytes, parse_range, parse_state
from cayleygrowth.graph import make_graph
from cayleygrowth.io import RunManifest, read_growth_csv, sha256, write_growth_csv, write_json
from cayleygrowth.search import sheveleva2


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def bfs_layers(gens, start):
    """Plain-tuple BFS with the position action s'[i] = s[g[i]]."""
    dist = {start: 0}
    todo = deque([start])
    while todo:
        s = todo.popleft()
        for g in gens:
            t = tuple(s[i] for i in g)
            if t not in dist:
                dist[t] = dist[s] + 1
                todo.append(t)
    return np.bincount(list(dist.values())).tolist()


# ------------------------------------------------------------ argument parsing


def test_parse_helpers():
    assert parse_bytes("8GiB") == 8 * 2**30
    assert parse_bytes("512M") == 512 * 2**20
    assert parse_bytes("1e9") == 10**9
    assert parse_state("[0, 0,1 1]") == (0, 0, 1, 1)
    assert parse_range("4..7") == [4, 5, 6, 7]
    assert parse_range("9") == [9]


# ------------------------------------------------------------ growth


def test_growth_coxeter6(tmp_path, capsys):
    code, out = run(tmp_path, "growth", "--family", "coxeter", "--n", "6")
    assert code == 0
    rows = (out / "growth.csv").read_text().splitlines()
    assert rows[0] == "layer,count" and len(rows) - 1 == 16
    summary = json.loads((out / "summary.json").read_text())
    assert summary["diameter"] == 15 and summary["reachable"] == 720
    assert read_growth_csv(out / "growth.csv") == bfs_layers(catalog("coxeter", 6).perms, tuple(range(6)))
    assert "diameter 15" in capsys.readouterr().out


def test_growth_lrx7_binary_coset(tmp_path):
    code, out = run(tmp_path, "growth", "--family", "lrx", "--n", "7", "--coset", "binary")
    assert code == 0
    oracle = bfs_layers(catalog("lrx", 7).perms, (0, 0, 0, 1, 1, 1, 1))
    assert read_growth_csv(out / "growth.csv") == oracle
    assert json.loads((out / "summary.json").read_text())["diameter"] == len(oracle) - 1


def test_growth_lx2(tmp_path):
    code, out = run(tmp_path, "growth", "--family", "lx", "--n", "2")
    assert code == 0
    assert read_growth_csv(out / "growth.csv") == [1, 1]
    assert json.loads((out / "summary.json").read_text())["diameter"] == 1


def test_growth_def_json_and_adjacency(tmp_path):
    graph = make_graph(catalog("coxeter", 4))
    spec = tmp_path / "def.json"
    write_json(spec, graph.to_dict())
    code, out = run(tmp_path, "growth", "--def-json", str(spec), "--adjacency", "--engine", "hash")
    assert code == 0
    assert read_growth_csv(out / "growth.csv") == [1, 3, 5, 6, 5, 3, 1]
    mat = spio.mmread(str(out / "adjacency.mtx")).toarray()
    assert mat.shape == (24, 24)
    assert (mat.sum(axis=1) == 3).all() and (mat == mat.T).all()
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["outputs"]) == {"growth.csv", "summary.json", "adjacency.mtx"}


def test_growth_matrix_family(tmp_path):
    code, out = run(tmp_path, "growth", "--family", "heisenberg", "--n", "1", "--m", "3")
    assert code == 0
    assert sum(read_growth_csv(out / "growth.csv")) == 27


def test_growth_reruns_are_byte_identical(tmp_path):
    argv = ["growth", "--family", "lrx", "--n", "6", "--threads", "2"]
    _, a = run(tmp_path, *argv, name="a")
    _, b = run(tmp_path, *argv, name="b")
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["outputs"] == mb["outputs"]
    for name, digest in ma["outputs"].items():
        assert sha256(a / name) == digest
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_growth_thread_count_does_not_change_output(tmp_path):
    base = ["growth", "--family", "transposons", "--n", "8", "--engine", "bitmask"]
    _, a = run(tmp_path, *base, "--threads", "1", name="a")
    _, b = run(tmp_path, *base, "--threads", "3", name="b")
    assert (a / "growth.csv").read_bytes() == (b / "growth.csv").read_bytes()


# ------------------------------------------------------------ exit codes


def test_exit_code_unknown_family(tmp_path, capsys):
    code, _ = run(tmp_path, "growth", "--family", "no_such_family", "--n", "5")
    assert code == 4
    assert "error" in capsys.readouterr().err


def test_exit_code_pending_family(tmp_path):
    from cayleygrowth.catalog import PENDING
    code, _ = run(tmp_path, "growth", "--family", sorted(PENDING)[0], "--n", "6")
    assert code == 4


def test_exit_code_budget(tmp_path):
    code, _ = run(tmp_path, "growth", "--family", "coxeter", "--n", "9",
                  "--engine", "bitmask", "--memory-budget", "1000")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ["growth", "--family", "coxeter"],
    ["growth", "--n", "5"],
    ["growth", "--family", "heisenberg", "--n", "2"],
    ["growth", "--family", "coxeter", "--n", "5", "--coset", "0,0,7"],
])
def test_exit_code_usage(tmp_path, argv):
    code, _ = run(tmp_path, *argv)
    assert code == 2


def test_argparse_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["growth", "--family", "coxeter", "--n", "five"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["growth", "--family", "coxeter", "--n", "4", "--threads", "0"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cayleygrowth.cli", "growth", "--family", "coxeter",
                           "--n", "4", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "diameter 6" in proc.stdout


# ------------------------------------------------------------ sweep


def test_sweep_transposons(tmp_path):
    code, out = run(tmp_path, "sweep", "--family", "transposons", "--n-range", "4..10",
                    "--fit", "1", "2")
    assert code == 0
    fit = json.loads((out / "fit.json").read_text())
    assert [d for _, d in fit["points"]] == [-(-(n + 1) // 2) for n in range(4, 11)]
    assert fit["fit"]["s"] == 2
    assert (out / "sweep.csv").read_text().startswith("n,diameter,reachable,truncated\n")


def test_sweep_records_per_n_errors(tmp_path):
    code, out = run(tmp_path, "sweep", "--family", "coxeter", "--n-range", "3..9",
                    "--engine", "bitmask", "--memory-budget", "4000")
    assert code == 0
    fit = json.loads((out / "fit.json").read_text())
    # three bitsets of n!/8 bytes each
    fits = [n for n in range(3, 10) if 3 * -(-factorial(n) // 8) <= 4000]
    assert [n for n, _ in fit["points"]] == fits
    assert sorted(fit["errors"], key=int) == [str(n) for n in range(3, 10) if n not in fits]


# ------------------------------------------------------------ search, pattern, pathfind


def test_search_directed_n5(tmp_path):
    code, out = run(tmp_path, "search", "--n", "5", "--directed")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["max_diameter"] == 14 and summary["complete"]
    top = json.loads((out / "records.jsonl").read_text().splitlines()[0])
    assert top["diameter"] == 14


def test_pattern_sheveleva2_8_3(tmp_path, capsys):
    code, out = run(tmp_path, "pattern", "--family", "sheveleva2", "--n", "8", "--param", "k=3")
    assert code == 0
    dot = (out / "support.dot").read_text()
    assert dot.startswith(("graph", "digraph", "strict"))
    assert "is_square_with_whiskers: true" in capsys.readouterr().out
    summary = json.loads((out / "summary.json").read_text())
    assert summary["is_square_with_whiskers"] is True
    assert summary["generators"] == sheveleva2(8, 3).to_dict()


def test_pattern_dot_out_option(tmp_path):
    dot = tmp_path / "custom.dot"
    code, out = run(tmp_path, "pattern", "--family", "coxeter", "--n", "5", "--dot-out", str(dot))
    assert code == 0 and dot.exists()
    assert "custom.dot" in json.loads((out / "manifest.json").read_text())["outputs"]


def test_pathfind_start_equals_target(tmp_path):
    code, out = run(tmp_path, "pathfind", "--family", "lrx", "--n", "6", "--target", "0,1,2,3,4,5")
    assert code == 0
    path = json.loads((out / "path.json").read_text())
    assert path["moves"] == [] and path["length"] == 0 and path["verified"] is True


def test_pathfind_coxeter_reversal(tmp_path):
    code, out = run(tmp_path, "pathfind", "--family", "coxeter", "--n", "6",
                    "--target", "5,4,3,2,1,0", "--expected-length", "15")
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["notes"]["length_gate"] == "met"
    path = json.loads((out / "path.json").read_text())
    assert path["length"] == 15 and path["verified"]


def test_pathfind_failure_exit_1(tmp_path):
    code, out = run(tmp_path, "pathfind", "--family", "coxeter", "--n", "6",
                    "--target", "5,4,3,2,1,0", "--max-steps", "3")
    assert code == 1
    assert not (out / "path.json").exists()


# ------------------------------------------------------------ io


def test_growth_csv_round_trip(tmp_path):
    sizes = [1, 4, 9, 4, 1]
    p = write_growth_csv(tmp_path / "g.csv", sizes)
    assert read_growth_csv(p) == sizes
    assert p.read_text() == "layer,count\n0,1\n1,4\n2,9\n3,4\n4,1\n"


def test_growth_csv_rejects_gaps(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("layer,count\n0,1\n2,3\n")
    with pytest.raises(ValueError):
        read_growth_csv(p)


def test_manifest_records_digests(tmp_path):
    p = write_json(tmp_path / "x.json", {"b": np.int64(2), "a": np.arange(3)})
    assert p.read_text() == '{\n  "a": [\n    0,\n    1,\n    2\n  ],\n  "b": 2\n}\n'
    m = RunManifest("growth", {"n": 4})
    m.record(p)
    m.write(tmp_path)
    data = json.loads((tmp_path / "manifest.json").read_text())
    assert data["outputs"] == {"x.json": sha256(p)}
    assert data["command"] == "growth" and data["args"] == {"n": 4}
