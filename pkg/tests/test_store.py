import json

import pytest

from modelsteer import canonical
from modelsteer.errors import (
    CorruptSnapshot,
    DanglingReference,
    JournalParseError,
    UnknownProject,
)
from modelsteer.forest import Hyperparameters, ModelArtifact, TreeNode
from modelsteer.store import ProjectStore, _blob_name

from conftest import make_dataset


@pytest.fixture
def store(tmp_path):
    s = ProjectStore(tmp_path)
    s.create_project("p1", {"features": [], "target": {}}, Hyperparameters())
    return s


@pytest.fixture
def small_ds():
    return make_dataset({"a": [1.0, None, 3.0], "b": [0.5, 0.25, 0.125]}, [0, 1, 0])


def minimal_record(snapshot_id, model_ref, bundle_ref, version_id=1):
    return {
        "v": 1,
        "version_id": version_id,
        "parent": None if version_id == 1 else version_id - 1,
        "cause": "initial" if version_id == 1 else "manual",
        "config": None,
        "dataset_snapshot_id": snapshot_id,
        "model_ref": model_ref,
        "bundle_ref": bundle_ref,
        "metrics": {
            "holdout_accuracy": 1.0, "train_size": 2, "n_features": 2,
            "confusion_counts": [[1, 0], [0, 0]], "positive_rate": 0.0,
        },
        "accuracy_delta": None,
        "summary": "test",
        "created_at": version_id,
    }


def tiny_model():
    return ModelArtifact(
        [TreeNode(proba=(1.0, 0.0))], ["a", "b"], Hyperparameters(n_trees=1),
        "sha256:none", 2,
    )


class TestSnapshots:
    def test_round_trip(self, store, small_ds):
        ref = store.put_snapshot("p1", small_ds)
        assert ref == small_ds.snapshot_id
        loaded = store.get_snapshot("p1", ref)
        assert loaded == small_ds

    def test_put_is_idempotent(self, store, small_ds):
        first = store.put_snapshot("p1", small_ds)
        second = store.put_snapshot("p1", small_ds)
        assert first == second
        snapshots = list((store.project_dir("p1") / "snapshots").iterdir())
        assert len(snapshots) == 1

    def test_tampered_file_detected(self, store, small_ds):
        ref = store.put_snapshot("p1", small_ds)
        path = store.project_dir("p1") / "snapshots" / _blob_name(ref)
        data = path.read_bytes().replace(b'"label":0', b'"label":1', 1)
        path.write_bytes(data)
        with pytest.raises(CorruptSnapshot):
            store.get_snapshot("p1", ref)

    def test_missing_blob_is_dangling(self, store):
        with pytest.raises(DanglingReference):
            store.get_snapshot("p1", "sha256:" + "0" * 64)

    def test_model_round_trip(self, store):
        m = tiny_model()
        ref = store.put_model("p1", m)
        loaded = store.get_model("p1", ref)
        assert canonical.dumps(loaded.to_payload()) == canonical.dumps(m.to_payload())


class TestJournal:
    def put_all(self, store, small_ds):
        sid = store.put_snapshot("p1", small_ds)
        mref = store.put_model("p1", tiny_model())
        bref = store.put_bundle("p1", {"v": 1, "kind": "bundle", "stub": True})
        return sid, mref, bref

    def test_append_and_reload(self, store, small_ds):
        sid, mref, bref = self.put_all(store, small_ds)
        for v in (1, 2, 3):
            store.append_version("p1", minimal_record(sid, mref, bref, v))
        records = store.read_journal("p1")
        assert [r["version_id"] for r in records] == [1, 2, 3]

    def test_dangling_reference_rejected_at_append(self, store, small_ds):
        sid, mref, bref = self.put_all(store, small_ds)
        bad = minimal_record(sid, mref, "sha256:" + "f" * 64)
        with pytest.raises(DanglingReference):
            store.append_version("p1", bad)
        assert store.read_journal("p1") == []

    def test_truncated_final_line_dropped(self, store, small_ds):
        sid, mref, bref = self.put_all(store, small_ds)
        store.append_version("p1", minimal_record(sid, mref, bref, 1))
        store.append_version("p1", minimal_record(sid, mref, bref, 2))
        path = store.project_dir("p1") / "journal.jsonl"
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) - 40])  # tear the second record mid-write
        records = store.read_journal("p1")
        assert [r["version_id"] for r in records] == [1]

    def test_garbage_middle_line_raises(self, store, small_ds):
        sid, mref, bref = self.put_all(store, small_ds)
        store.append_version("p1", minimal_record(sid, mref, bref, 1))
        store.append_version("p1", minimal_record(sid, mref, bref, 2))
        path = store.project_dir("p1") / "journal.jsonl"
        lines = path.read_bytes().split(b"\n")
        lines[0] = b"{corrupted"
        path.write_bytes(b"\n".join(lines))
        with pytest.raises(JournalParseError):
            store.read_journal("p1")

    def test_journal_lines_parse_independently(self, store, small_ds):
        sid, mref, bref = self.put_all(store, small_ds)
        store.append_version("p1", minimal_record(sid, mref, bref, 1))
        store.append_version("p1", minimal_record(sid, mref, bref, 2))
        path = store.project_dir("p1") / "journal.jsonl"
        for line in path.read_bytes().splitlines():
            json.loads(line)


class TestProjects:
    def test_unknown_project(self, store):
        with pytest.raises(UnknownProject):
            store.load_schema_doc("ghost")

    def test_list_projects_requires_journal(self, store, small_ds):
        assert store.list_projects() == []  # p1 has no journal yet
        sid = store.put_snapshot("p1", small_ds)
        mref = store.put_model("p1", tiny_model())
        bref = store.put_bundle("p1", {"v": 1})
        store.append_version("p1", minimal_record(sid, mref, bref))
        assert store.list_projects() == ["p1"]

    def test_lock_reentrant_across_project(self, store):
        with store.lock("p1"):
            pass  # release works
        with store.lock("p1"):
            pass
