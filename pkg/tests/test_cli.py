import json
import subprocess
import sys

import pytest

from mmclust import datasets, mine
from mmclust import io as mio
from mmclust.cli import default_threads, main

WOMEN = str(datasets.path("southern_women"))
TOYBIB = str(datasets.path("toybib"))
KARATE = str(datasets.path("karate"))
FLOR2 = str(datasets.path("florentine_business"))


def run(*argv):
    return main([str(a) for a in argv])


def _records(path):
    lines = path.read_text().splitlines()
    return json.loads(lines[0]), [json.loads(x) for x in lines[1:]]


def test_mine_toybib(tmp_path):
    out = tmp_path / "c.jsonl"
    assert run("mine", "--arity", 3, "--rho-min", 0, TOYBIB, "-o", out, "--no-timing",
               "--summary", tmp_path / "s.json") == 0
    head, recs = _records(out)
    assert head["arity"] == 3 and len(head["mode_names"]) == 3
    assert [["u2", "u4"], ["t1", "t2"], ["p1"]] in [r["components"] for r in recs]
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["input"]["tuples"] == 12
    assert summary["results"]["operations"] == 36


def test_mine_women_rho_one_is_empty(tmp_path):
    out = tmp_path / "c.jsonl"
    assert run("mine", "--rho-min", 1, WOMEN, "-o", out, "--summary", tmp_path / "s.json") == 0
    head, recs = _records(out)
    assert head["count"] == 0 and recs == []
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["results"]["clusters"] == 0
    assert {"read", "generate", "density+dedup", "filter", "write"} <= set(summary["timings_s"])


def test_mine_empty_input_warns(tmp_path, caplog):
    src = tmp_path / "empty.tsv"
    src.write_text("")
    out = tmp_path / "c.jsonl"
    assert run("mine", "--arity", 2, src, "-o", out, "--summary", tmp_path / "s.json") == 0
    assert "no tuples" in caplog.text
    head, recs = _records(out)
    assert head["count"] == 0 and recs == []


def test_mine_stdout_and_filters(tmp_path, capsys, women):
    assert run("mine", "--rho-min", 0.8, WOMEN, "--summary", tmp_path / "s.json") == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0])["count"] == len(lines) - 1 == 22
    assert run("mine", "--keep-duplicates", WOMEN, "-o", tmp_path / "d.jsonl",
               "--summary", tmp_path / "s.json") == 0
    assert _records(tmp_path / "d.jsonl")[0]["count"] == 93
    assert run("mine", "--weak", WOMEN, "-o", tmp_path / "w.jsonl",
               "--summary", tmp_path / "s.json") == 0
    assert 0 < _records(tmp_path / "w.jsonl")[0]["count"] <= 83


def test_mine_float_compat_differs_on_karate(tmp_path):
    counts = []
    for extra in ([], ["--float-compat"]):
        out = tmp_path / f"k{len(extra)}.jsonl"
        assert run("mine", "--rho-min", 0.6000000000000001, *extra, KARATE, "-o", out,
                   "--summary", tmp_path / "s.json") == 0
        counts.append(_records(out)[0]["count"])
    assert counts[0] >= counts[1]


def test_concepts_women_and_readers(tmp_path):
    out = tmp_path / "c.jsonl"
    assert run("concepts", WOMEN, "-o", out, "--summary", tmp_path / "s.json") == 0
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["results"] == {"concepts": 67, "proper": 65}
    assert run("concepts", datasets.path("readers"), "-o", out,
               "--summary", tmp_path / "s.json") == 0
    assert _records(out)[0]["count"] == 9


def test_concepts_karate_cliques(tmp_path):
    out = tmp_path / "c.jsonl"
    assert run("concepts", "--cliques", KARATE, "-o", out, "--summary", tmp_path / "s.json") == 0
    _, recs = _records(out)
    cliques = [r["components"][0] for r in recs if r.get("clique")]
    assert ["0", "1", "2", "3", "7"] in cliques


def test_concepts_size_guard_exit_code(tmp_path):
    src = tmp_path / "big.tsv"
    src.write_text("".join(f"g{i}\tm{i}\n" for i in range(70)))
    assert run("concepts", "--arity", 2, src, "-o", tmp_path / "c.jsonl") == 4
    assert run("concepts", "--override", "--arity", 2, src, "-o", tmp_path / "c.jsonl",
               "--summary", tmp_path / "s.json") == 0


def test_sweep_women(tmp_path, women):
    out = tmp_path / "s.csv"
    assert run("sweep", WOMEN, "-o", out, "--summary", tmp_path / "s.json") == 0
    rows = mio.read_sweep(out)
    assert len(rows) == 21
    assert (rows[0]["unique_biclusters"], rows[0]["fraction"]) == (83, 1.0)
    assert (rows[16]["unique_biclusters"], rows[16]["fraction"]) == (22, 0.78)


def test_sweep_florentine_business_row(tmp_path):
    out = tmp_path / "s.csv"
    assert run("sweep", "--float-compat", FLOR2, "-o", out, "--summary", tmp_path / "s.json") == 0
    row = mio.read_sweep(out)[16]
    assert (row["unique_biclusters"], row["fraction"]) == (19, 0.85)


def test_sweep_single_value(tmp_path, women):
    out = tmp_path / "s.csv"
    assert run("sweep", "--grid", "0.8", WOMEN, "-o", out, "--summary", tmp_path / "s.json") == 0
    rows = mio.read_sweep(out)
    assert len(rows) == 1 and rows[0]["unique_biclusters"] == len(mine(women, 0.8))


def test_measure(tmp_path):
    clusters = tmp_path / "c.jsonl"
    assert run("mine", WOMEN, "-o", clusters, "--summary", tmp_path / "s.json") == 0
    out, csv_out = tmp_path / "m.json", tmp_path / "m.csv"
    assert run("measure", WOMEN, "--clusters", clusters, "--bins", "exp2", "-o", out,
               "--csv", csv_out, "--summary", tmp_path / "s.json") == 0
    report = json.loads(out.read_text())
    assert sum(b["count"] for b in report["histogram"]) == report["count"] == 83
    assert report["coverage_concepts"]["count"] == 65
    assert len(csv_out.read_text().splitlines()) == 84


def test_measure_singleton_diversity(tmp_path):
    src = tmp_path / "one.tsv"
    src.write_text("a\tx\n")
    clusters = tmp_path / "c.jsonl"
    assert run("mine", "--arity", 2, src, "-o", clusters, "--summary", tmp_path / "s.json") == 0
    out = tmp_path / "m.json"
    assert run("measure", "--arity", 2, src, "--clusters", clusters, "-o", out,
               "--summary", tmp_path / "s.json") == 0
    assert json.loads(out.read_text())["diversity"] == 1


def test_measure_rejects_mismatched_clusters(tmp_path):
    clusters = tmp_path / "c.jsonl"
    assert run("mine", "--arity", 3, TOYBIB, "-o", clusters, "--summary", tmp_path / "s.json") == 0
    assert run("measure", WOMEN, "--clusters", clusters, "-o", tmp_path / "m.json") == 3


def test_convert_karate_to_cxt(tmp_path):
    out = tmp_path / "k.cxt"
    assert run("convert", "--to", "cxt", KARATE, "-o", out, "--summary", tmp_path / "s.json") == 0
    ctx = mio.read_cxt(out)
    assert ctx.sizes == (34, 34) and len(ctx) == 190


def test_convert_triangle_irreflexive(tmp_path):
    src = tmp_path / "t.edges"
    src.write_text("a b\nb c\na c\n")
    out = tmp_path / "t.cxt"
    assert run("convert", "--to", "cxt", "--encoding", "irreflexive", src, "-o", out,
               "--summary", tmp_path / "s.json") == 0
    assert len(mio.read_cxt(out)) == 6


def test_convert_cxt_tuples_cxt_round_trip(tmp_path, women):
    tsv, back = tmp_path / "w.tsv", tmp_path / "w.cxt"
    assert run("convert", "--to", "tuples", WOMEN, "-o", tsv, "--summary", tmp_path / "s.json") == 0
    assert run("convert", "--to", "cxt", "--arity", 2, tsv, "-o", back,
               "--summary", tmp_path / "s.json") == 0
    ctx = mio.read_cxt(back)
    named = lambda c: {(c.labels[0][g], c.labels[1][m]) for g, m in c.tuples}
    assert named(ctx) == named(women)


def test_convert_lossy_needs_force(tmp_path):
    # isolated families keep their diagonal cross only under the reflexive encoding
    assert run("convert", "--to", "tuples", FLOR2, "-o", tmp_path / "f.tsv",
               "--summary", tmp_path / "s.json") == 0
    lossy = ["--encoding", "irreflexive", FLOR2, "-o", tmp_path / "f.tsv"]
    assert run("convert", "--to", "tuples", *lossy) == 2
    assert run("convert", "--to", "tuples", "--force", *lossy,
               "--summary", tmp_path / "s.json") == 0
    assert run("convert", "--to", "cxt", TOYBIB, "--arity", 3, "-o", tmp_path / "x.cxt") == 2
    assert run("convert", "--to", "edges", WOMEN, "-o", tmp_path / "x.edges") == 2


def test_edges_round_trip_via_cxt(tmp_path):
    cxt, edges = tmp_path / "k.cxt", tmp_path / "k.edges"
    assert run("convert", "--to", "cxt", KARATE, "-o", cxt, "--summary", tmp_path / "s.json") == 0
    assert run("convert", "--to", "edges", cxt, "-o", edges, "--summary", tmp_path / "s.json") == 0
    g = mio.read_edges(edges)
    assert g.n_edges == 78


@pytest.mark.parametrize("argv, code", [
    (["mine", "--rho-min", "1.5", WOMEN], 2),
    (["frobnicate"], 2),
    ([], 2),
    (["sweep", "--grid", "0.5 0.2", WOMEN], 2),
    (["mine", "/nonexistent/file.cxt"], 5),
])
def test_exit_codes(argv, code):
    assert run(*argv) == code


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cxt"
    bad.write_text("B\n\n1\n1\n\ng\nm\nQ\n")
    assert run("concepts", bad) == 3
    assert "bad.cxt:8:" in capsys.readouterr().err


def test_strict_tuple_parsing(tmp_path):
    src = tmp_path / "t.tsv"
    src.write_text("a\tb\nc\n")
    assert run("mine", "--arity", 2, "--strict", src, "-o", tmp_path / "c.jsonl") == 3
    assert run("mine", "--arity", 2, src, "-o", tmp_path / "c.jsonl", "-q",
               "--summary", tmp_path / "s.json") == 0
    assert json.loads((tmp_path / "s.json").read_text())["input"]["skipped_lines"] == 1


def test_determinism_without_timing(tmp_path):
    outs = []
    for i in range(2):
        c, s, w = tmp_path / f"c{i}", tmp_path / f"s{i}", tmp_path / f"w{i}"
        assert run("mine", "--threads", 1 + 3 * i, KARATE, "-o", c, "--no-timing", "--summary", s) == 0
        assert run("sweep", "--threads", 1 + 3 * i, KARATE, "-o", w, "--no-timing",
                   "--summary", tmp_path / "x") == 0
        summary = json.loads(s.read_text())
        for key in ("threads", "output"):
            summary["parameters"].pop(key)
        outs.append((c.read_bytes(), w.read_bytes(), summary))
    assert outs[0] == outs[1]


def test_summary_manifest_fields(tmp_path):
    s = tmp_path / "s.json"
    assert run("mine", "--rho-min", "0,5", WOMEN, "-o", tmp_path / "c", "--summary", s) == 0
    summary = json.loads(s.read_text())
    assert summary["tool"] == "mmclust" and summary["command"] == "mine"
    assert summary["parameters"]["rho_min"] == 0.5
    assert "version" in summary and "timings_s" in summary


def test_threads_env(monkeypatch):
    monkeypatch.setenv("MMCLUST_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("MMCLUST_THREADS", "zero")
    assert default_threads() >= 1


def test_console_script_stdin():
    proc = subprocess.run([sys.executable, "-m", "mmclust.cli", "mine", "--arity", "2", "-",
                           "--no-timing"], input="a\tx\nb\tx\n", capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout.splitlines()[0])["count"] == 1
    assert json.loads(proc.stderr)["results"]["generated"] == 2
