import json
import os

import pytest

from strigraph import files
from strigraph.cli import main
from strigraph.graph import GraphBuilder, expand_wire
from strigraph.theories import gw_theory, zx_theory, zx_cnot_graph


@pytest.fixture
def zx_files(tmp_path):
    zx = zx_theory()
    gpath = tmp_path / "cnot.graph"
    gpath.write_text(files.dumps(files.graph_to_doc(zx_cnot_graph(zx.sig))))
    rpath = tmp_path / "zx.rules"
    rpath.write_text(files.dumps(files.rules_to_doc(zx.rules, "zx")))
    tpath = tmp_path / "zx.theory"
    tpath.write_text(files.dumps(files.theory_to_doc("zx", zx.sig,
                                                     zx.valuation)))
    return {"graph": str(gpath), "rules": str(rpath), "theory": str(tpath),
            "dir": tmp_path}


def test_validate_ok(zx_files, capsys):
    assert main(["validate", zx_files["graph"]]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_rejects_junk(tmp_path, capsys):
    p = tmp_path / "bad.graph"
    p.write_text("{\"theory\": \"zx\", \"vertices\": [], \"edges\": [],"
                 "\"inputs\": [\"x\"], \"outputs\": []}\n")
    assert main(["validate", str(p)]) == 1


def test_iso_self(zx_files, capsys):
    assert main(["iso", zx_files["graph"], zx_files["graph"]]) == 0
    assert "isomorphic" in capsys.readouterr().out


def test_iso_distinct(zx_files, tmp_path, capsys):
    zx = zx_theory()
    b = GraphBuilder(zx.sig)
    _, ins, outs = b.add_generator("had")
    other = tmp_path / "had.graph"
    other.write_text(files.dumps(files.graph_to_doc(b.freeze(ins, outs))))
    assert main(["iso", zx_files["graph"], str(other)]) == 1


def test_normalize_reaches_minimal_form(zx_files, tmp_path, capsys):
    zx = zx_theory()
    g = zx_cnot_graph(zx.sig)
    g = expand_wire(g, sorted(g.edges)[0], 3)
    stretched = tmp_path / "stretched.graph"
    stretched.write_text(files.dumps(files.graph_to_doc(g)))
    trace = tmp_path / "trace.json"
    assert main(["normalize", str(stretched), "--rules", zx_files["rules"],
                 "--trace", str(trace)]) == 0
    out = capsys.readouterr().out
    doc = json.loads(out)
    assert len(doc["vertices"]) < len(g.vertices)
    assert json.loads(trace.read_text())["status"] in ("normal_form",
                                                       "step_limit")


def test_match_and_rewrite(zx_files, capsys):
    assert main(["match", zx_files["rules"], zx_files["graph"],
                 "--rule", "z_cocomm"]) == 0
    out = capsys.readouterr().out
    assert "z_cocomm[0]" in out
    assert main(["--format", "json", "rewrite", zx_files["graph"],
                 "--rules", zx_files["rules"], "--rule", "z_cocomm",
                 "--match", "0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    zx = zx_theory()
    files.graph_from_doc(doc, zx.sig)   # reloads cleanly


def test_rewrite_bad_match_index(zx_files, capsys):
    assert main(["rewrite", zx_files["graph"], "--rules", zx_files["rules"],
                 "--rule", "z_cocomm", "--match", "99"]) == 1


def test_eval_json_roundtrip(zx_files, capsys):
    assert main(["--format", "json", "eval", zx_files["graph"]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["entries"]) == 16


def test_eval_deterministic_bytes(zx_files, capsys):
    main(["--format", "json", "eval", zx_files["graph"]])
    a = capsys.readouterr().out
    main(["--format", "json", "eval", zx_files["graph"]])
    assert capsys.readouterr().out == a


def test_check_theory_bundled(capsys):
    assert main(["check-theory", "gw"]) == 0
    assert "ok" in capsys.readouterr().out


def test_theory_path_lookup(zx_files, monkeypatch, capsys):
    monkeypatch.setenv("STRIGRAPH_THEORY_PATH", str(zx_files["dir"]))
    assert main(["check-theory", "zx"]) == 0


def test_synth_cli_deterministic(tmp_path, capsys):
    out1 = tmp_path / "a.rules"
    assert main(["--format", "json", "synth", "--theory", "gw_pair",
                 "-M", "0", "-N", "1", "-B", "1", "-P", "1",
                 "--seed", "3", "--out", str(out1)]) == 0
    rep1 = capsys.readouterr().out
    out2 = tmp_path / "b.rules"
    assert main(["--format", "json", "synth", "--theory", "gw_pair",
                 "-M", "0", "-N", "1", "-B", "1", "-P", "1",
                 "--seed", "3", "--out", str(out2)]) == 0
    rep2 = capsys.readouterr().out
    assert rep1 == rep2
    assert out1.read_text() == out2.read_text()
    doc = json.loads(rep1)
    assert "counts" in doc and "rules" in doc


def test_usage_error_exit_code():
    assert main(["no-such-command"]) == 2
