"""Acceptance suite: one test per release criterion, one printed verdict each.

Run with output visible to read the verdict lines:

    pytest tests/test_acceptance.py -s
"""

import functools
import json
import subprocess
import sys
import time

import numpy as np
from fastapi.testclient import TestClient

from modelsteer import canonical, rng
from modelsteer.api_schemas import validate_payload
from modelsteer.corrections import CorrectionPlan, apply_corrections
from modelsteer.dataset import ingest_csv
from modelsteer.forest import Hyperparameters, ModelArtifact, TreeNode, train
from modelsteer.bundle import build_bundle
from modelsteer.manual_config import GuardrailPolicy, ManualConfiguration, validate_manual
from modelsteer.orchestrator import Orchestrator, verify_project
from modelsteer.profiling import data_quality, tukey_fences
from modelsteer.service import create_app
from modelsteer.shap_values import BACKGROUND_SIZE, ShapEngine, shap_exact
from modelsteer.store import ProjectStore
from modelsteer.surrogate import surrogate_rules

from conftest import FIXTURES, make_dataset
from test_shap import oracle_phi_permutations, random_model


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE FAIL {name}")
                raise
            print(f"\nACCEPTANCE PASS {name}")
            return result

        return wrapper

    return decorate


@criterion("shapley-local-accuracy")
def test_shapley_local_accuracy_50_instances_under_60s(pima, pima_model):
    model, _ = pima_model
    gen = rng.stream(42, rng.EXPLAIN)
    rows = np.sort(gen.permutation(pima.n_rows)[:50])
    bg_rows = np.sort(gen.permutation(pima.n_rows)[:BACKGROUND_SIZE])
    start = time.monotonic()
    engine = ShapEngine(model, pima.matrix[bg_rows])
    for row in rows:
        exp = engine.explain(pima.matrix[row])
        assert abs(exp.base_value + sum(exp.phi) - exp.fx) <= 1e-6
    assert time.monotonic() - start < 60.0


@criterion("shapley-oracle-equivalence")
def test_shapley_oracle_equivalence_20_models():
    gen = np.random.default_rng(20240401)
    for _trial in range(20):
        n_features = int(gen.integers(2, 5))
        model = random_model(gen, n_features)
        background = gen.normal(size=(int(gen.integers(2, 8)), n_features))
        x = gen.normal(size=n_features)
        exp = shap_exact(model, x, background)
        oracle = oracle_phi_permutations(model, x, background)
        for got, want in zip(exp.phi, oracle):
            assert abs(got - want) <= 1e-9


@criterion("shapley-dummy-and-symmetry")
def test_dummy_and_symmetry_axioms():
    # dummy: feature 1 appears in no split -> exactly zero attribution
    tree = TreeNode(
        feature=0, threshold=0.0, missing_left=True,
        left=TreeNode(proba=(0.8, 0.2)), right=TreeNode(proba=(0.3, 0.7)),
    )
    model = ModelArtifact([tree], ["a", "b"], Hyperparameters(n_trees=1), "sha256:x", 9)
    gen = np.random.default_rng(6)
    exp = shap_exact(model, [0.4, -2.0], gen.normal(size=(12, 2)))
    assert exp.phi[1] == 0.0

    # symmetry: two features in interchangeable roles with identical data
    def stump(feature):
        return TreeNode(
            feature=feature, threshold=0.0, missing_left=True,
            left=TreeNode(proba=(0.9, 0.1)), right=TreeNode(proba=(0.1, 0.9)),
        )

    sym = ModelArtifact(
        [stump(0), stump(1)], ["a", "b"], Hyperparameters(n_trees=2), "sha256:x", 9
    )
    col = gen.normal(size=10)
    exp = shap_exact(sym, [0.7, 0.7], np.column_stack([col, col]))
    assert abs(exp.phi[0] - exp.phi[1]) <= 1e-9


@criterion("pipeline-determinism")
def test_full_pipeline_byte_identical(pima_csv_bytes, pima_schema_doc, default_hp):
    def full_run():
        ds = ingest_csv(pima_csv_bytes, pima_schema_doc)
        model, metrics = train(ds, default_hp)
        bundle = build_bundle(model, metrics, ds)
        return (
            canonical.dumps(model.to_payload()),
            canonical.dumps(bundle.to_payload()),
        )

    model_a, bundle_a = full_run()
    model_b, bundle_b = full_run()
    assert model_a == model_b
    assert bundle_a == bundle_b


@criterion("model-sanity-accuracy-floor")
def test_pima_holdout_accuracy_floor(pima_model):
    _, metrics = pima_model
    assert metrics.holdout_accuracy >= 0.70


@criterion("surrogate-fidelity-and-rules")
def test_surrogate_contract(pima, pima_model):
    model, _ = pima_model
    rules, fidelity = surrogate_rules(model, pima)
    assert 0.0 <= fidelity <= 1.0
    pred = model.predict_classes(pima.matrix)
    baseline = max(float(np.mean(pred == 0)), float(np.mean(pred == 1)))
    assert fidelity > baseline
    assert len(rules) <= 5
    label_index = {label: i for i, label in enumerate(pima.target_labels)}
    for rule in rules:
        mask = np.ones(pima.n_rows, dtype=bool)
        for cond in rule.conditions:
            col = pima.matrix[:, pima.feature_index(cond.feature)]
            with np.errstate(invalid="ignore"):
                ok = col <= cond.threshold if cond.op == "<=" else col > cond.threshold
            mask &= np.where(np.isnan(col), False, ok)
        coverage = mask.sum() / pima.n_rows
        assert abs(coverage - rule.coverage) <= 1e-12
        covered = mask.sum()
        confidence = (
            float(np.mean(pred[mask] == label_index[rule.predicted_label]))
            if covered else 0.0
        )
        assert abs(confidence - rule.confidence) <= 1e-12
        assert abs(rule.score - rule.coverage * rule.confidence) <= 1e-12


@criterion("quality-and-correction-oracles")
def test_quality_and_correction_fixtures(pima):
    # hand-computed Tukey fences on [1,2,3,4,100]
    lo, hi = tukey_fences(np.array([1.0, 2.0, 3.0, 4.0, 100.0]))
    assert (lo, hi) == (-1.0, 7.0)
    fence_ds = make_dataset({"a": [1.0, 2.0, 3.0, 4.0, 100.0]}, [0, 0, 1, 1, 1])
    q = data_quality(fence_ds)
    assert q.per_feature["a"].outlier_fraction == 1 / 5
    winsorized, _ = apply_corrections(CorrectionPlan(("outliers",), seed=1), fence_ds)
    assert list(winsorized.matrix[:, 0]) == [1.0, 2.0, 3.0, 4.0, 7.0]

    # duplicating one row of a 10-row set -> uniqueness 10/11
    dup_ds = make_dataset(
        {"a": [float(v) for v in range(10)] + [0.0]}, [0, 1] * 5 + [0]
    )
    assert data_quality(dup_ds).uniqueness == 10 / 11

    # 90/10 oversampling to parity, deterministic bytes
    imb = make_dataset({"a": [float(v) for v in range(100)]}, [0] * 90 + [1] * 10)
    plan = CorrectionPlan(("class_imbalance",), seed=5)
    balanced, _ = apply_corrections(plan, imb)
    again, _ = apply_corrections(plan, imb)
    assert balanced.n_rows == 180
    assert balanced.class_counts() == (90, 90)
    assert canonical.dumps(balanced.to_payload()) == canonical.dumps(again.to_payload())

    # post-correction invariants on the real fixture
    fixed, _ = apply_corrections(CorrectionPlan(("disguised_missing",), seed=1), pima)
    assert not np.isnan(fixed.matrix).any()
    original_fences = {
        i: tukey_fences(pima.matrix[:, i][~np.isnan(pima.matrix[:, i])])
        for i in range(pima.n_features)
    }
    clamped, _ = apply_corrections(CorrectionPlan(("outliers",), seed=1), pima)
    for i, (lo_i, hi_i) in original_fences.items():
        col = clamped.matrix[:, i]
        values = col[~np.isnan(col)]
        assert np.all((values >= lo_i) & (values <= hi_i))


@criterion("guardrail-rejections")
def test_guardrail_rejections_with_stable_codes(pima):
    before = pima.snapshot_id

    verdict = validate_manual(
        ManualConfiguration(frozenset(["Glucose"]), {}, 1), pima
    )
    assert (verdict.status, verdict.code) == ("reject", "min_features")

    verdict = validate_manual(
        ManualConfiguration(
            frozenset(pima.feature_names), {"Glucose": (180.0, 200.0)}, 1
        ),
        pima,
    )
    assert (verdict.status, verdict.code) == ("reject", "max_row_drop")

    permissive_drop = GuardrailPolicy(
        max_row_drop_fraction=1.0, warn_row_drop_fraction=1.0, min_rows=50
    )
    verdict = validate_manual(
        ManualConfiguration(
            frozenset(pima.feature_names), {"Glucose": (180.0, 200.0)}, 1
        ),
        pima,
        permissive_drop,
    )
    assert (verdict.status, verdict.code) == ("reject", "min_rows")

    assert pima.snapshot_id == before  # validation mutates nothing


@criterion("steering-loop-consistency")
def test_steering_loop(tmp_path, pima_csv_bytes, pima_schema_doc, default_hp, pima_issues):
    store = ProjectStore(tmp_path / "loop_store")
    orch = Orchestrator(store)
    session = orch.initialize_project(
        pima_csv_bytes, pima_schema_doc, default_hp, project_id="loop"
    )

    # identity manual config: accuracy delta exactly zero
    features = frozenset(f["name"] for f in pima_schema_doc["features"])
    identity = ManualConfiguration(features, {}, base_version=1)
    v2 = orch.steer_manual(session, identity)
    assert v2.accuracy_delta == 0.0

    # single-issue sandbox impact equals the committed delta
    issue = pima_issues[0]
    plan = CorrectionPlan(
        (issue.kind,), base_version=session.active_version, seed=default_hp.seed
    )
    v3 = orch.steer_automated(session, plan)
    assert v3.accuracy_delta == issue.estimated_accuracy_impact

    # journal replay: in process and through the CLI surface
    results = verify_project(store, "loop")
    assert all(ok for _vid, ok in results)
    proc = subprocess.run(
        [sys.executable, "-m", "modelsteer.cli", "verify", "loop",
         "--data-dir", str(tmp_path / "loop_store")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip().splitlines()[-1] == "OK"


@criterion("api-contract")
def test_api_contract(tmp_path):
    def parts():
        return {
            "csv": ("pima.csv", (FIXTURES / "pima.csv").read_bytes(), "text/csv"),
            "schema": (
                "pima.schema.json",
                (FIXTURES / "pima.schema.json").read_bytes(),
                "application/json",
            ),
            "hyperparameters": (
                "hp.json",
                (FIXTURES / "default_hyperparameters.json").read_bytes(),
                "application/json",
            ),
        }

    schema_doc = json.loads((FIXTURES / "pima.schema.json").read_text())
    feature_names = [f["name"] for f in schema_doc["features"]]
    manual = {
        "included_features": [f for f in feature_names if f != "Insulin"],
        "ranges": {"BMI": [15, 60]},
        "base_version": 1,
    }
    auto = {"selected_kinds": ["disguised_missing"], "base_version": 2, "seed": 42}

    http_dir = tmp_path / "http_store"
    client = TestClient(create_app(http_dir))

    r = client.post("/projects", files=parts())
    assert r.status_code == 201
    validate_payload("project_created", r.json())
    pid = r.json()["project_id"]

    r = client.get(f"/projects/{pid}/bundle")
    validate_payload("bundle", r.json())

    r = client.get(f"/projects/{pid}/issues")
    validate_payload("issues", r.json())

    r = client.put(f"/projects/{pid}/config/manual", json=manual)
    assert r.status_code == 200
    validate_payload("steer_response", r.json())

    # a second identical mutation must be rejected as stale, not merged
    r = client.put(f"/projects/{pid}/config/manual", json=manual)
    assert r.status_code == 409
    validate_payload("error", r.json())
    assert r.json()["error"]["code"] == "stale_base_version"

    r = client.post(f"/projects/{pid}/config/auto", json=auto)
    assert r.status_code == 200
    validate_payload("steer_response", r.json())

    r = client.post(f"/projects/{pid}/rollback", json={"version_id": 1})
    assert r.status_code == 200
    validate_payload("steer_response", {"version": r.json()["version"]})

    r = client.get(f"/projects/{pid}/versions")
    validate_payload("history", r.json())

    # the same steps through the CLI yield a byte-identical version log
    cli_dir = tmp_path / "cli_store"
    script_path = tmp_path / "flow.json"
    script_path.write_text(json.dumps([
        {"type": "manual", "config": manual},
        {"type": "auto", "plan": auto},
        {"type": "rollback", "target_version": 1},
    ]))
    base_cmd = [sys.executable, "-m", "modelsteer.cli"]
    subprocess.run(
        base_cmd + [
            "ingest",
            str(FIXTURES / "pima.csv"),
            str(FIXTURES / "pima.schema.json"),
            str(FIXTURES / "default_hyperparameters.json"),
            "--data-dir", str(cli_dir), "--project-id", "cliflow",
        ],
        check=True, capture_output=True,
    )
    subprocess.run(
        base_cmd + ["steer", "cliflow", str(script_path), "--data-dir", str(cli_dir)],
        check=True, capture_output=True,
    )
    http_journal = (http_dir / pid / "journal.jsonl").read_bytes()
    cli_journal = (cli_dir / "cliflow" / "journal.jsonl").read_bytes()
    assert http_journal == cli_journal
