import json
import subprocess
import sys

import pytest

from wilson_triality.cli import estimate_seconds, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_field(capsys):
    code, out, _ = run(capsys, "field", "--p", "2", "--n", "1")
    assert code == 0
    assert "GF(2^3), 8 elements" in out
    assert "1 1 0 1" in out


def test_search_emits_jsonl_with_meta(capsys, tmp_path):
    path = tmp_path / "s.jsonl"
    code, out, _ = run(capsys, "search", "--p", "3", "--n", "1", "--emit", str(path), "--seed", "7")
    assert code == 0
    assert "Table 1: PASS" in out
    lines = path.read_text().splitlines()
    meta = json.loads(lines[0])["meta"]
    assert meta["seed"] == 7 and meta["q"] == 3
    recs = [json.loads(x) for x in lines[1:]]
    assert len(recs) == 24
    assert all(r["class"] == "III" and r["type"] == [14, 14, 14] for r in recs)
    assert set(recs[0]) >= {"a", "b", "c", "type", "order", "class"}


def test_identical_configs_give_identical_bytes(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(capsys, "search", "--p", "2", "--n", "2", "--all-orders", "--emit", str(a), "--jobs", "1")
    run(capsys, "search", "--p", "2", "--n", "2", "--all-orders", "--emit", str(b), "--jobs", "2")
    assert a.read_bytes() == b.read_bytes()


def test_table1_rows(capsys):
    code, out, _ = run(capsys, "table1", "--q", "3", "4")
    assert code == 0
    rows = [line.split() for line in out.splitlines()[1:]]
    assert rows[0] == ["3", "27", "0", "24", "0/24", "PASS"]
    assert rows[1] == ["4", "64", "12", "12", "12/12", "PASS"]


def test_table1_refuses_over_budget(capsys):
    code, out, err = run(capsys, "table1", "--q", "3", "23", "--budget", "60")
    assert code == 2
    assert "refused" in err and f"{estimate_seconds(23):.0f}s" in err
    assert out == ""


def test_table1_rejects_non_prime_power(capsys):
    code, _, err = run(capsys, "table1", "--q", "6")
    assert code == 2 and "prime power" in err


def test_classify_roundtrip(capsys, tmp_path):
    triples = tmp_path / "t.txt"
    run(capsys, "search", "--p", "3", "--n", "1", "--triples", str(triples))
    code, out, _ = run(capsys, "classify", str(triples))
    assert code == 0
    recs = [json.loads(x) for x in out.splitlines()]
    assert len(recs) == 24
    assert {r["class"] for r in recs} == {"III"}
    assert all(r["triality_k"] == 1 and set(r["duality_k"].values()) == {None} for r in recs)


def test_classify_diagnostics_and_parse_errors(capsys, tmp_path, triple_q3):
    from wilson_triality.maps import format_triple

    good = format_triple(triple_q3)
    parts = good.split(" | ")
    parts[1] = "1,0,0;1,0,0;0,0,0;1,0,0"  # det 1 but of order 3
    f = tmp_path / "mixed.txt"
    f.write_text("\n".join([good, " | ".join(parts), "garbage line", ""]) + "\n")
    code, out, err = run(capsys, "classify", str(f))
    assert code == 1
    recs = [json.loads(x) for x in out.splitlines()]
    assert recs[0]["valid"] and recs[0]["class"] == "III"
    assert not recs[1]["valid"] and "r0 is an involution" in recs[1]["failures"]
    assert recs[2]["line"] == 3 and "error" in recs[2]
    assert "line 3" in err


def test_classify_empty_file(capsys, tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("")
    assert run(capsys, "classify", str(f)) == (0, "", "")


def test_geometry_all(capsys, tmp_path):
    sols = tmp_path / "s.jsonl"
    edges = tmp_path / "edges.txt"
    run(capsys, "search", "--p", "3", "--n", "1", "--emit", str(sols))
    code, out, _ = run(capsys, "geometry", "--p", "3", "--n", "1", "--solution", f"{sols}:0",
                       "--verify", "all", "--export-edges", str(edges))
    assert code == 0
    checks = [line.split()[0:2] for line in out.splitlines()[2:]]
    assert checks == [[c, "PASS"] for c in ("counts", "geometry", "orbits", "firmness", "triality", "duality")]
    assert "(351, 2457, 351, 351)" in out
    assert " <-> " in edges.read_text().splitlines()[0]


def test_geometry_single_check(capsys):
    code, out, _ = run(capsys, "geometry", "--p", "3", "--n", "1", "--verify", "orbits")
    assert code == 0
    body = out.splitlines()[2:]
    assert len(body) == 1 and body[0].startswith("orbits")


def test_geometry_refuses_large_groups(capsys):
    code, _, err = run(capsys, "geometry", "--p", "5", "--n", "1")
    assert code == 2 and "bound" in err


def test_geometry_bad_solution_reference(capsys, tmp_path):
    sols = tmp_path / "s.jsonl"
    run(capsys, "search", "--p", "3", "--n", "1", "--emit", str(sols))
    code, _, err = run(capsys, "geometry", "--p", "3", "--n", "1", "--solution", f"{sols}:99")
    assert code == 2 and "out of range" in err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "wilson_triality", "field", "--p", "3", "--n", "1"],
                         capture_output=True, text=True, check=True)
    assert "GF(3^3)" in out.stdout


def test_jobs_default_from_environment(monkeypatch):
    from wilson_triality.cli import build_parser

    monkeypatch.setenv("WILSON_TRIALITY_JOBS", "3")
    args = build_parser().parse_args(["search", "--p", "3", "--n", "1"])
    assert args.jobs == 3
