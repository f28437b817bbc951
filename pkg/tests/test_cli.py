import io
import json
import subprocess
import sys

import jsonschema

from dpweyl import cli
from dpweyl.fixtures import NAMES, SCHEMAS, fixture_path, load_fixture, load_schema
from dpweyl.lattice import Isometry
from dpweyl.weylgroups import standard_coxeter


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def run_json(schema, *argv):
    code, text = run(*argv, "--json")
    assert code == 0, text
    data = json.loads(text)
    jsonschema.validate(data, load_schema(schema))
    assert data["schema"] == schema and data["version"] == 1
    return data


def test_fixtures_and_schemas_ship():
    for name in NAMES:
        assert fixture_path(name).is_file()
        assert load_fixture(name).n in (7, 8)
    for name in SCHEMAS:
        assert load_schema(name)["$schema"].startswith("https://json-schema.org/")


def test_classify_fixture_r():
    code, text = run("classify", "--fixture", "r")
    assert code == 0
    assert "order: 30" in text and "not_smoothly_realizable" in text
    data = run_json("classify", "classify", "--fixture", "r")
    assert data["fingerprint"]["order"] == 30 and data["status"] == "not_smoothly_realizable"


def test_classify_identity_from_file_and_stdin(tmp_path, monkeypatch):
    path = tmp_path / "id.txt"
    path.write_text(Isometry.identity(5).to_text())
    code, text = run("classify", str(path))
    assert code == 0 and "reducible" in text and "out_of_scope_reducible" in text
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps([list(r) for r in standard_coxeter(4).matrix])))
    data = run_json("classify", "classify", "-")
    assert data["fingerprint"]["order"] == 5 and data["status"] == "realizable_all_equivalent"


def test_verdict_outputs():
    code, text = run("verdict", "--fixture", "w_d4_3a1")
    assert code == 0 and "not_smoothly_realizable" in text and "certificate:" in text
    data = run_json("verdict", "verdict", "--fixture", "w_a7")
    assert data["label"] == "A_7" and all(c["holds"] for c in data["certificate"]["checks"])


def test_classes_and_counts():
    data = run_json("classes", "classes", "--n", "4")
    assert len(data["classes"]) == 7 and sum(c["size"] for c in data["classes"]) == 120
    data = run_json("classes", "classes", "--n", "5", "--cuspidal")
    assert len(data["classes"]) == 3
    code, text = run("classes", "--n", "3")
    assert code == 0 and text.count("\n") == 7
    data = run_json("counts", "counts")
    assert [(r["n"], r["count"]) for r in data["rows"][:5]] == [(3, 2), (4, 24), (5, 240), (6, 4320), (7, 161280)]
    code, text = run("counts")
    assert "161280" in text and "pinned" in text


def test_enumerate_writes_cache(tmp_path):
    data = run_json("enumerate", "enumerate", "--n", "5", "--kind", "parabolic", "--cache", str(tmp_path))
    assert data["order"] == 192 and data["kind"] == "parabolic_P"
    assert list(tmp_path.glob("parabolic_P_n5_*.dpwc"))


def test_gsig():
    data = run_json("gsig", "gsig", "--m", "10", "--target", "3", "--points", "1")
    assert data["solutions"] == []
    data = run_json("gsig", "gsig", "--m", "8", "--target", "-2", "--points", "2",
                    "--rotations", "1,3,5,7", "--offset", "2")
    assert {"m": 8, "points": [[1, 3], [1, 3]], "surfaces": []} in data["solutions"]
    code, text = run("gsig", "--m", "4", "--target", "2", "--surfaces", "1", "--selfints", "2")
    assert code == 0 and text.startswith("1 configuration")


def test_verify_paper_subset():
    data = run_json("report", "verify-paper", "--only", "3", "8")
    assert data["passed"] and {c["criterion"] for c in data["checks"]} == {3, 8}


def test_exit_codes(tmp_path):
    assert run("--help")[0] == 0
    assert run()[0] == 2
    assert run("classes")[0] == 2
    assert run("classes", "--n", "5", "--threads", "0")[0] == 2
    assert run("classify")[0] == 2
    assert run("classify", str(tmp_path / "missing.txt"))[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n3 4\n")
    assert run("classify", str(bad))[0] == 2
    assert run("classes", "--n", "8")[0] == 3
    assert run("enumerate", "--n", "8", "--cache", str(tmp_path))[0] == 3
    assert run("gsig", "--m", "30", "--target", "0", "--points", "5", "--cap", "10")[0] == 3
    assert run("gsig", "--m", "5", "--target", "0", "--rotations", "a,b")[0] == 2


def test_verify_paper_failure_exit(monkeypatch):
    from dpweyl import checks

    monkeypatch.setattr(checks, "CHECKS", [(3, "always fails", lambda **kw: (False, "forced"))])
    code, text = run("verify-paper", "--skip-large")
    assert code == 1 and "FAIL" in text


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "dpweyl.cli", "classify", "--fixture", "r3", "--json"],
                         capture_output=True, text=True, check=True)
    data = json.loads(res.stdout)
    assert data["n"] == 8 and data["fingerprint"]["order"] == 3
