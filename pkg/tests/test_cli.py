from __future__ import annotations

import json

import pytest

from graphrigidity.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_k4(capsys):
    code, out, _ = run(capsys, "analyze", "named:K4")
    report = json.loads(out)
    assert code == 0
    assert report["tool"] == "graphrigidity"
    assert report["inputs"] == {"named:K4": "named"}
    text = json.dumps(report)
    assert '"betti": 3' in text


def test_output_is_deterministic(capsys, tmp_path):
    for cmd in (("analyze", "named:K4+e"), ("measure", "named:theta", "--depth", "3"), ("compare", "named:K4", "named:K33")):
        a = run(capsys, *cmd)[1]
        b = run(capsys, *cmd)[1]
        assert a == b and a


def test_measure_csv(capsys):
    code, out, _ = run(capsys, "measure", "named:theta", "--depth", "2")
    assert code == 0
    assert out.splitlines()[0] == "word,depth,value"


def test_csv_only_for_measure(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "named:K4", "--format", "csv"])
    assert exc.value.code == 2


def test_format_error_names_line(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("v 0\nx 1 2\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2
    assert "bad.txt: line 2" in err


def test_unknown_named_graph_is_usage_error(capsys):
    code, _, err = run(capsys, "analyze", "named:nope")
    assert code == 2 and "nope" in err


def test_hypothesis_violation_exit_code(capsys):
    code, _, _ = run(capsys, "compare", "named:C4+chord", "named:K4")
    assert code == 1


def test_deck_round_trip(capsys, tmp_path):
    deck_dir = tmp_path / "deck"
    code, _, _ = run(capsys, "deck", "named:C4+chord", "--out", str(deck_dir))
    assert code == 0
    manifest = json.loads((deck_dir / "deck.json").read_text())
    assert sum(c["multiplicity"] for c in manifest["cards"]) == manifest["n_edges"] == 5
    code, out, _ = run(capsys, "reconstruct", "--deck", str(deck_dir), "--hidden", "named:C4+chord", "--all-cards")
    assert code == 0
    assert json.loads(out)["reconstruction"]["success"]
    # without an overlap source only the deck context is reported
    code, out, _ = run(capsys, "reconstruct", "--deck", str(deck_dir))
    assert code == 1
    assert "context" in out


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "basis", "named:theta", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["tool"] == "graphrigidity"


def test_cover_and_corpus_gen(capsys, tmp_path):
    code, out, _ = run(capsys, "cover", "named:K4", "--samples", "2")
    assert code == 0
    code, out, _ = run(capsys, "corpus-gen", "--max-edges", "5", "--out", str(tmp_path / "c"))
    assert code == 0
    assert len(list((tmp_path / "c").glob("*.txt"))) == 7


def test_verify_subset(capsys):
    code, _, err = run(capsys, "verify", "--max-edges", "5", "--only", "1,6,corpus")
    assert code == 0
    assert err.count("[PASS]") == 3
