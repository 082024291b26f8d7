import json

import pytest

from sepkit.cli import EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, main
from sepkit.graph import dumbbell
from sepkit.profiles import enumerate_profile_levels, profile_to_json


@pytest.fixture
def db_file(tmp_path):
    p = tmp_path / "db.json"
    p.write_text(json.dumps(dumbbell().to_json()))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_invariants_passes(capsys, db_file):
    code, out, _ = run(capsys, "check-invariants", "--graph", db_file, "--k", "1")
    assert code == EXIT_OK
    assert "FAIL" not in out and "torso clique" in out


def test_malformed_json_is_an_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "profiles", "--graph", str(bad))
    assert code == EXIT_INPUT and "malformed JSON" in err


def test_missing_graph_source(capsys):
    code, _, err = run(capsys, "profiles")
    assert code == EXIT_INPUT


def test_bad_robustness(capsys, db_file):
    code, _, err = run(capsys, "profiles", "--graph", db_file, "--r", "lots")
    assert code == EXIT_INPUT


def test_profiles_listing(capsys, db_file):
    code, out, _ = run(capsys, "profiles", "--graph", db_file, "--k", "1")
    assert code == EXIT_OK
    assert len(json.loads(out)["profiles"]) == 4


def test_min_order(capsys, tmp_path, db_file):
    G = dumbbell()
    lv = enumerate_profile_levels(G, 1)[1]
    p = tmp_path / "two.json"
    p.write_text(json.dumps({"profiles": [profile_to_json(P) for P in lv[:2]]}))
    code, out, _ = run(capsys, "oracle", "min-order", "--graph", db_file, "--profiles", str(p))
    assert code == EXIT_OK and out.strip() == "1"
    p.write_text(json.dumps({"profiles": [profile_to_json(lv[0])]}))
    code, _, _ = run(capsys, "oracle", "min-order", "--graph", db_file, "--profiles", str(p))
    assert code == EXIT_INPUT


def test_oracle_separations(capsys, db_file):
    code, out, _ = run(capsys, "oracle", "separations", "--graph", db_file, "--k", "1")
    assert code == EXIT_OK and json.loads(out)["count"] == 6


def test_generate_files(capsys, tmp_path):
    g, e = tmp_path / "g.json", tmp_path / "e.json"
    code, _, _ = run(capsys, "generate", "--family", "grid-product", "--depth", "5",
                     "--nmax", "3", "--out", str(g), "--ends", str(e))
    assert code == EXIT_OK
    assert sorted(json.loads(e.read_text())["ends"]) == ["base", "w1", "w2", "w3"]
    assert json.loads(g.read_text())["vertices"]


def test_generate_bad_param(capsys):
    code, _, _ = run(capsys, "generate", "--family", "binary-tree", "--param", "nmax")
    assert code == EXIT_INPUT


def test_distinguish_emit(capsys, tmp_path, db_file):
    out = tmp_path / "res.json"
    code, stdout, _ = run(capsys, "distinguish", "--graph", db_file, "--emit", str(out))
    assert code == EXIT_OK and stdout == ""
    doc = json.loads(out.read_text())
    assert doc["nested"] and all(c["order"] >= 1 for c in doc["certificates"])


def test_decompose_from_file(capsys, tmp_path, db_file):
    n = tmp_path / "n.json"
    n.write_text(json.dumps({"nested": [["1|2", "1|3", "2|3"]]}))
    code, out, _ = run(capsys, "decompose", "--graph", db_file, "--nested", str(n))
    doc = json.loads(out)
    assert code == EXIT_OK and doc["valid"] and doc["adhesion"] == 1


def test_star_and_spanning_tree(capsys):
    code, out, _ = run(capsys, "star", "--family", "binary-tree", "--depth", "4")
    assert code == EXIT_OK and len(json.loads(out)["hosted"]) == 4
    code, out, _ = run(capsys, "spanning-tree", "--family", "binary-tree", "--depth", "4")
    assert code == EXIT_OK and json.loads(out)["split_near_root"] == []


def test_spanning_tree_reports_early_split(capsys):
    code, out, _ = run(capsys, "spanning-tree", "--family", "grid-product", "--depth", "5")
    assert code == EXIT_INVARIANT and json.loads(out)["split_near_root"] == ["w4"]


def test_dot_output(capsys):
    code, out, _ = run(capsys, "generate", "--family", "binary-tree", "--depth", "2", "--dot")
    assert code == EXIT_OK and out.startswith("graph")
