import json
import re
import subprocess
import sys

import pytest

from conftest import FIXTURES

CLI = [sys.executable, "-m", "modelsteer.cli"]


def run_cli(*args, check=True):
    result = subprocess.run(
        CLI + [str(a) for a in args], capture_output=True, text=True
    )
    if check and result.returncode != 0:
        raise AssertionError(
            f"cli failed ({result.returncode}):\n{result.stdout}\n{result.stderr}"
        )
    return result


@pytest.fixture(scope="module")
def ingested(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("cli_store")
    result = run_cli(
        "ingest",
        FIXTURES / "pima.csv",
        FIXTURES / "pima.schema.json",
        FIXTURES / "default_hyperparameters.json",
        "--data-dir", data_dir,
        "--project-id", "demo",
    )
    return data_dir, result


def test_ingest_output_format(ingested):
    _data_dir, result = ingested
    lines = result.stdout.strip().splitlines()
    fields = dict(line.split(" ", 1) for line in lines)
    assert fields["project"] == "demo"
    assert fields["version"] == "1"
    assert 0.0 <= float(fields["accuracy"]) <= 1.0
    assert fields["train_size"].isdigit()


def test_steer_identity_prints_zero_delta(ingested, tmp_path):
    data_dir, _ = ingested
    schema = json.loads((FIXTURES / "pima.schema.json").read_text())
    script = [{
        "type": "manual",
        "config": {
            "included_features": [f["name"] for f in schema["features"]],
            "ranges": {},
            "base_version": None,
        },
    }]
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(script))
    result = run_cli("steer", "demo", path, "--data-dir", data_dir)
    line = result.stdout.strip().splitlines()[0]
    assert re.fullmatch(
        r"step 1 manual version 2 accuracy \d\.\d{4} delta \+0\.0000", line
    )


def test_verify_reports_ok(ingested):
    data_dir, _ = ingested
    result = run_cli("verify", "demo", "--data-dir", data_dir)
    lines = result.stdout.strip().splitlines()
    assert lines[-1] == "OK"
    assert all(l.endswith("OK") for l in lines[:-1])
    assert result.returncode == 0


def test_unknown_project_error_code(ingested):
    data_dir, _ = ingested
    result = run_cli("verify", "ghost", "--data-dir", data_dir, check=False)
    assert result.returncode == 1
    assert result.stderr.startswith("error unknown_project")


def test_stale_script_step_fails_with_code(ingested, tmp_path):
    data_dir, _ = ingested
    script = [{
        "type": "auto",
        "plan": {"selected_kinds": ["duplicates"], "base_version": None},
    }]
    path = tmp_path / "stale.json"
    path.write_text(json.dumps(script))
    result = run_cli("steer", "demo", path, "--data-dir", data_dir, check=False)
    assert result.returncode == 1
    assert result.stderr.startswith("error stale_issue")


def test_invalid_script_rejected(ingested, tmp_path):
    data_dir, _ = ingested
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([{"type": "sideways"}]))
    result = run_cli("steer", "demo", path, "--data-dir", data_dir, check=False)
    assert result.returncode == 1
    assert result.stderr.startswith("error invalid_payload")


def test_shipped_example_script_runs(ingested):
    from modelsteer.api_schemas import validate_payload

    data_dir, _ = ingested
    script_path = FIXTURES / "example_steering_script.json"
    validate_payload("steering_script", json.loads(script_path.read_text()))
    run_cli(
        "ingest",
        FIXTURES / "pima.csv",
        FIXTURES / "pima.schema.json",
        FIXTURES / "default_hyperparameters.json",
        "--data-dir", data_dir,
        "--project-id", "example",
    )
    result = run_cli("steer", "example", script_path, "--data-dir", data_dir)
    lines = result.stdout.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("step 1 manual version 2")
    assert lines[1].startswith("step 2 auto version 3")
    assert lines[2].startswith("step 3 rollback version 4")
    verify = run_cli("verify", "example", "--data-dir", data_dir)
    assert verify.stdout.strip().splitlines()[-1] == "OK"
