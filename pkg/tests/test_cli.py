import csv
import io
import re
from pathlib import Path

import pytest

from wcojmatch.cli import main
from wcojmatch.graph import write_csr_binary
from wcojmatch.synthetic import syn_graph
from wcojmatch.graph import build_csr

ROOT = Path(__file__).resolve().parent.parent
GRAPH = str(ROOT / "data" / "fig3.txt")
QUERY = str(ROOT / "queries" / "fig3_triangle.txt")


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    return dict(line.split(": ", 1) for line in text.splitlines())


def strip_elapsed(text):
    return "\n".join(line for line in text.splitlines() if not line.split(":")[0].endswith("elapsed_s"))


def test_run_iso(capsys):
    code, out, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", QUERY, "--mode", "iso")
    assert code == 0
    assert "matchings: 2\n" in out


def test_run_hom_instances(capsys):
    code, out, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", QUERY, "--mode", "hom", "--instances", "4", "--stride", "100")
    r = report(out)
    assert code == 0 and r["matchings"] == "6"
    assert len([k for k in r if k.endswith(".source_edges")]) == 4
    assert sum(int(r[f"instance.{i}.source_edges"]) for i in range(4)) == 7


def test_run_output_file(capsys, tmp_path):
    out_path = tmp_path / "m.txt"
    code, _, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", QUERY, "--output", str(out_path), "--instances", "1")
    assert code == 0
    lines = sorted(out_path.read_text().splitlines())
    assert lines == ["0 2 1", "3 1 0"]


def test_run_is_reproducible(capsys):
    argv = ["run", "--graph", GRAPH, "--query", QUERY, "--mode", "hom", "--qvo", "best", "--seed", "3"]
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)
    assert strip_elapsed(first) == strip_elapsed(second)
    assert re.search(r"^elapsed_s: \d+\.\d{6}$", first, re.M)


def test_binary_graph(capsys, tmp_path):
    path = tmp_path / "g.csr"
    with open(GRAPH) as fh, open(path, "wb") as out:
        from wcojmatch.graph import load_edge_list

        write_csr_binary(build_csr(load_edge_list(fh)), out)
    code, out, _ = invoke(capsys, "run", "--graph", str(path), "--query", QUERY)
    assert code == 0 and report(out)["matchings"] == "2"


def test_oracle(capsys):
    code, out, _ = invoke(capsys, "oracle", "--graph", GRAPH, "--query", QUERY, "--mode", "hom")
    assert code == 0 and report(out)["matchings"] == "6"


def test_missing_query_file(capsys, tmp_path):
    code, _, err = invoke(capsys, "run", "--graph", GRAPH, "--query", str(tmp_path / "none.txt"))
    assert code == 3 and err


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\nzero 2\n")
    code, _, err = invoke(capsys, "run", "--graph", str(bad), "--query", QUERY)
    assert code == 4 and "line 2" in err


def test_query_error(capsys, tmp_path):
    q = tmp_path / "q.txt"
    q.write_text("0 0\n")
    code, _, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", str(q))
    assert code == 5


def test_bad_qvo(capsys):
    code, _, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", QUERY, "--qvo", "0,0,1")
    assert code == 5


def test_config_error(capsys):
    code, _, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", QUERY, "--instances", "0")
    assert code == 6


def test_capacity_error(capsys):
    code, _, _ = invoke(capsys, "run", "--graph", GRAPH, "--query", str(ROOT / "queries" / "q7.txt"), "--max-levels", "4")
    assert code == 5


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2


def test_bench_csv(capsys):
    code, out, _ = invoke(capsys, "bench-intersect", "--sizes", "64", "--overlap", "0,1", "--k", "2,4", "--repetitions", "20")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    full = [r for r in rows if float(r["overlap"]) == 1.0]
    assert all(r["output_size"] == "64" for r in full)
    disjoint_k2 = [r for r in rows if r["k"] == "2" and float(r["overlap"]) == 0.0][0]
    assert int(disjoint_k2["compare_steps_max"]) <= 8


def test_bench_bad_overlap(capsys):
    code, _, _ = invoke(capsys, "bench-intersect", "--overlap", "2", "--repetitions", "1")
    assert code == 6


def test_estimate_syn(capsys, tmp_path):
    path = tmp_path / "syn.txt"
    edges = syn_graph(1024, 8, seed=0).edges
    path.write_text("".join(f"{a} {b}\n" for a, b in edges.tolist()))
    q = tmp_path / "q.txt"
    q.write_text("%mode hom\n%qvo 0,1,2\n0 1\n0 2\n2 1\n")
    code, out, _ = invoke(capsys, "estimate", "--graph", str(path), "--query", str(q))
    r = report(out)
    assert code == 0
    assert r["source.predicted"].split(".")[0] == r["source.measured"] == "577"
    assert r["extend.2.predicted"] == "24576.000000"
    assert r["extend.2.within_tolerance"] == "true"


def test_estimate_fig3_unit_line(capsys):
    code, out, _ = invoke(capsys, "estimate", "--graph", GRAPH, "--query", QUERY, "--line-width", "1")
    r = report(out)
    assert code == 0
    assert r["source.predicted"] == "12.000000"  # (4 + 1) + 7


def test_qvos(capsys):
    code, out, _ = invoke(capsys, "qvos", "--query", QUERY, "--graph", GRAPH)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 7
    assert lines[0].startswith("0,1,2  source=out L2:f=1,s=2")
    assert lines[-1].startswith("best: ")
