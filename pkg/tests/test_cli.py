"""Command-line contract: outputs, exit codes, trace files, cache parity."""

import json
import subprocess
import sys

import pytest
from jsonschema import validate

from sqadd.arith import identity_table
from sqadd.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, run


@pytest.fixture(autouse=True)
def in_tmp_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def invoke(argv, capsys):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRepr:
    def test_lists_representations(self, capsys):
        code, out, _ = invoke(["repr", "28", "4"], capsys)
        assert code == EXIT_OK
        assert out.splitlines() == ["1 1 1 5", "1 3 3 3", "2 2 2 4"]

    def test_empty_for_33_into_5(self, capsys):
        code, out, _ = invoke(["repr", "33", "5"], capsys)
        assert code == EXIT_OK
        assert out == ""

    def test_json_count(self, capsys):
        code, out, _ = invoke(["repr", "33", "5", "--format", "json"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload == {"n": 33, "k": 5, "count": 0, "representations": []}


class TestExceptions:
    def test_five_squares_pass(self, capsys):
        code, out, _ = invoke(["exceptions", "5", "40"], capsys)
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "1,2,3,4,6,7,9,10,12,15,18,33"
        assert lines[1] == "PASS"

    def test_hurwitz_mode(self, capsys):
        code, out, _ = invoke(["exceptions", "3", "1100", "--hurwitz"], capsys)
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "1,4,16,25,64,100,256,400,1024"
        assert lines[1] == "PASS"

    def test_json_schema(self, capsys):
        code, out, _ = invoke(
            ["exceptions", "6", "25", "--format", "json"], capsys
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        schema = {
            "type": "object",
            "properties": {
                "k": {"type": "integer"},
                "N": {"type": "integer"},
                "members": {"type": "array", "items": {"type": "integer"}},
                "reference": {"type": ["array", "null"]},
                "match": {"type": "boolean"},
            },
            "required": ["k", "N", "members", "reference", "match"],
        }
        validate(payload, schema)
        assert payload["match"] is True
        assert payload["members"] == [1, 2, 3, 4, 5, 7, 8, 10, 11, 13, 16, 19]

    def test_hurwitz_requires_k3(self, capsys):
        code, _, err = invoke(["exceptions", "4", "100", "--hurwitz"], capsys)
        assert code == EXIT_USAGE
        assert "usage error" in err

    def test_cache_does_not_change_output(self, capsys, tmp_path):
        cache_dir = tmp_path / "cache"
        code1, out1, _ = invoke(["exceptions", "4", "300"], capsys)
        code2, out2, _ = invoke(
            ["exceptions", "4", "300", "--cache-dir", str(cache_dir)], capsys
        )
        code3, out3, _ = invoke(
            ["exceptions", "4", "300", "--cache-dir", str(cache_dir)], capsys
        )
        assert code1 == code2 == code3 == EXIT_OK
        assert out1 == out2 == out3


class TestDeduce:
    def test_json_table_and_trace_file(self, capsys, tmp_path):
        code, out, _ = invoke(["deduce", "3", "60", "--format", "json"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        schema = {
            "type": "object",
            "properties": {
                "verdict": {"type": "string"},
                "k": {"type": "integer"},
                "N": {"type": "integer"},
                "table": {
                    "type": "object",
                    "additionalProperties": {"type": "string"},
                },
                "trace_file": {"type": "string"},
            },
            "required": ["verdict", "k", "N", "trace_file"],
        }
        validate(payload, schema)
        assert payload["verdict"] == "forced"
        assert payload["table"]["25"] == "25"
        trace = tmp_path / payload["trace_file"]
        lines = trace.read_text().splitlines()
        assert lines
        for line in lines:
            record = json.loads(line)
            assert list(record) == ["step", "branch", "rule", "inputs", "output"]

    def test_trace_overwrite_needs_force(self, capsys):
        code1, _, _ = invoke(["deduce", "3", "20"], capsys)
        assert code1 == EXIT_OK
        code2, _, err = invoke(["deduce", "3", "20"], capsys)
        assert code2 == EXIT_USAGE
        assert "--force" in err
        code3, _, _ = invoke(["deduce", "3", "20", "--force"], capsys)
        assert code3 == EXIT_OK

    def test_underdetermined_text(self, capsys):
        code, out, _ = invoke(["deduce", "2", "40", "--force"], capsys)
        assert code == EXIT_OK
        assert "verdict: underdetermined" in out

    def test_out_file_with_trace_beside_it(self, capsys, tmp_path):
        target = tmp_path / "result.json"
        code, out, _ = invoke(
            ["deduce", "3", "30", "--format", "json", "--out", str(target)], capsys
        )
        assert code == EXIT_OK
        assert out == ""
        payload = json.loads(target.read_text())
        assert payload["verdict"] == "forced"
        assert (tmp_path / "result.json.trace").exists()

    def test_budget_exhaustion_exit_code(self, capsys):
        code, _, err = invoke(
            ["deduce", "5", "200", "--max-steps", "60", "--force"], capsys
        )
        assert code == EXIT_BUDGET
        assert "budget" in err


class TestVerify:
    def test_ok_table(self, capsys, tmp_path):
        table = {str(k): str(v) for k, v in identity_table(40).items()}
        path = tmp_path / "table.json"
        path.write_text(json.dumps(table))
        code, out, _ = invoke(["verify", "3", "40", "--table", str(path)], capsys)
        assert code == EXIT_OK
        assert out.startswith("ok")

    def test_violation_exit_code(self, capsys, tmp_path):
        table = {str(k): str(v) for k, v in identity_table(30).items()}
        table["3"] = "1"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(table))
        code, out, _ = invoke(
            ["verify", "3", "30", "--table", str(path), "--format", "json"], capsys
        )
        assert code == EXIT_FAIL
        payload = json.loads(out)
        assert payload["ok"] is False
        assert payload["violation"]["n"] == 3

    def test_caret_site_keys_accepted(self, capsys, tmp_path):
        table = {str(k): str(v) for k, v in identity_table(20).items()}
        del table["16"]
        table["2^4"] = "16"
        path = tmp_path / "caret.json"
        path.write_text(json.dumps(table))
        code, out, _ = invoke(["verify", "3", "20", "--table", str(path)], capsys)
        assert code == EXIT_OK

    def test_missing_table_flag(self, capsys):
        code, _, err = invoke(["verify", "3", "30"], capsys)
        assert code == EXIT_USAGE

    def test_incomplete_table(self, capsys, tmp_path):
        path = tmp_path / "sparse.json"
        path.write_text(json.dumps({"2": "2"}))
        code, _, err = invoke(["verify", "3", "30", "--table", str(path)], capsys)
        assert code == EXIT_USAGE
        assert "missing" in err


class TestSearch2:
    def test_witness_round_trips_through_verify(self, capsys, tmp_path):
        code, out, _ = invoke(
            ["search2", "1000", "--format", "json"], capsys
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["deviations"]
        path = tmp_path / "witness.json"
        path.write_text(json.dumps(payload["witness"]))
        code2, out2, _ = invoke(
            ["verify", "2", "1000", "--table", str(path)], capsys
        )
        assert code2 == EXIT_OK


class TestUsage:
    def test_unknown_format(self, capsys):
        code, _, err = invoke(["repr", "10", "2", "--format", "yaml"], capsys)
        assert code == EXIT_USAGE

    def test_bad_k(self, capsys):
        code, _, _ = invoke(["deduce", "1", "50"], capsys)
        assert code == EXIT_USAGE

    def test_no_subcommand(self, capsys):
        assert run([]) == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sqadd", "repr", "12", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "2 2 2"


def test_traces_identical_across_processes(tmp_path):
    # fresh interpreters, byte-identical trace files
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        proc = subprocess.run(
            [
                sys.executable, "-m", "sqadd",
                "deduce", "4", "80", "--out", str(out), "--format", "json",
            ],
            capture_output=True,
            text=True,
            cwd=tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append((tmp_path / f"{name}.json.trace").read_bytes())
    assert outputs[0] == outputs[1]
