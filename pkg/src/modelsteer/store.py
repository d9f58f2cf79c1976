"""File-backed project store: content-addressed blobs plus a journal.

Layout per project::

    <root>/<project_id>/
        schema.json              ingested schema document
        hyperparameters.json     training hyperparameters
        snapshots/sha256_*.json  dataset snapshots, content addressed
        models/sha256_*.json     model artifacts, content addressed
        bundles/sha256_*.json    explanation bundles, content addressed
        journal.jsonl            one canonical JSON version record per line
        lock                     advisory write lock

Blobs are written atomically (temp file + rename) and verified against
their digest on read. The journal is append-only with an fsync per
record: a crash can lose at most the record being written, never a
committed one, and a truncated final line is dropped on load.
"""

from __future__ import annotations

import fcntl
import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Mapping

from . import canonical
from .dataset import Dataset
from .errors import (
    CorruptSnapshot,
    DanglingReference,
    JournalParseError,
    UnknownProject,
)
from .forest import Hyperparameters, ModelArtifact

JOURNAL = "journal.jsonl"
SCHEMA_DOC = "schema.json"
HYPERPARAMETERS = "hyperparameters.json"


def _blob_name(ref: str) -> str:
    return ref.replace(":", "_") + ".json"


class ProjectStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    # -- project lifecycle -------------------------------------------------

    def project_dir(self, project_id: str) -> Path:
        return self.root / project_id

    def project_exists(self, project_id: str) -> bool:
        return (self.project_dir(project_id) / JOURNAL).exists()

    def require_project(self, project_id: str) -> Path:
        pdir = self.project_dir(project_id)
        if not pdir.is_dir():
            raise UnknownProject(f"no project {project_id!r}")
        return pdir

    def list_projects(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir()
            if p.is_dir() and (p / JOURNAL).exists()
        )

    def create_project(
        self, project_id: str, schema_doc: Mapping[str, Any], hp: Hyperparameters
    ) -> None:
        pdir = self.project_dir(project_id)
        for sub in ("snapshots", "models", "bundles"):
            (pdir / sub).mkdir(parents=True, exist_ok=True)
        _atomic_write(pdir / SCHEMA_DOC, canonical.dumps(schema_doc))
        _atomic_write(pdir / HYPERPARAMETERS, canonical.dumps(hp.to_dict()))

    def load_schema_doc(self, project_id: str) -> dict:
        pdir = self.require_project(project_id)
        return json.loads((pdir / SCHEMA_DOC).read_bytes())

    def load_hyperparameters(self, project_id: str) -> Hyperparameters:
        pdir = self.require_project(project_id)
        return Hyperparameters.from_dict(
            json.loads((pdir / HYPERPARAMETERS).read_bytes())
        )

    # -- content-addressed blobs --------------------------------------------

    def put_snapshot(self, project_id: str, ds: Dataset) -> str:
        data = canonical.dumps(ds.to_payload())
        return self._put_blob(project_id, "snapshots", data)

    def get_snapshot(self, project_id: str, snapshot_id: str) -> Dataset:
        data = self._get_blob(project_id, "snapshots", snapshot_id)
        return Dataset.from_payload(canonical.loads(data))

    def put_model(self, project_id: str, m: ModelArtifact) -> str:
        data = canonical.dumps(m.to_payload())
        return self._put_blob(project_id, "models", data)

    def get_model(self, project_id: str, ref: str) -> ModelArtifact:
        data = self._get_blob(project_id, "models", ref)
        return ModelArtifact.from_payload(canonical.loads(data))

    def put_bundle(self, project_id: str, payload: Mapping[str, Any]) -> str:
        return self._put_blob(project_id, "bundles", canonical.dumps(payload))

    def get_bundle_bytes(self, project_id: str, ref: str) -> bytes:
        return self._get_blob(project_id, "bundles", ref)

    def _put_blob(self, project_id: str, category: str, data: bytes) -> str:
        ref = canonical.digest(data)
        path = self.require_project(project_id) / category / _blob_name(ref)
        if not path.exists():
            _atomic_write(path, data)
        return ref

    def _get_blob(self, project_id: str, category: str, ref: str) -> bytes:
        path = self.require_project(project_id) / category / _blob_name(ref)
        if not path.exists():
            raise DanglingReference(f"{category} blob {ref} does not exist")
        data = path.read_bytes()
        if canonical.digest(data) != ref:
            raise CorruptSnapshot(
                f"{category} blob {ref} fails its digest check", path=str(path)
            )
        return data

    def blob_exists(self, project_id: str, category: str, ref: str) -> bool:
        return (self.project_dir(project_id) / category / _blob_name(ref)).exists()

    # -- journal ---------------------------------------------------------------

    def append_version(self, project_id: str, record: Mapping[str, Any]) -> None:
        """Append one version record; every referenced blob must exist."""
        pdir = self.require_project(project_id)
        for category, key in (
            ("snapshots", "dataset_snapshot_id"),
            ("models", "model_ref"),
            ("bundles", "bundle_ref"),
        ):
            ref = record[key]
            if not self.blob_exists(project_id, category, ref):
                raise DanglingReference(
                    f"version record references missing {category} blob {ref}"
                )
        line = canonical.dumps(record) + b"\n"
        with open(pdir / JOURNAL, "ab") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def read_journal(self, project_id: str) -> list[dict]:
        """Parse all committed version records.

        A truncated, unparseable final line is treated as a torn write
        and dropped; garbage anywhere else raises JournalParseError.
        """
        pdir = self.require_project(project_id)
        path = pdir / JOURNAL
        if not path.exists():
            return []
        raw = path.read_bytes()
        records = []
        lines = raw.split(b"\n")
        # a well-formed journal ends with a newline, so the final split
        # element is empty; anything else is a torn tail
        complete, tail = lines[:-1], lines[-1]
        for i, line in enumerate(complete):
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                if i == len(complete) - 1 and tail == b"":
                    # torn write of the final record (newline made it, body did not)
                    break
                raise JournalParseError(i + 1) from None
        return records

    # -- locking ------------------------------------------------------------------

    @contextmanager
    def lock(self, project_id: str) -> Iterator[None]:
        """Advisory per-project write lock (blocks until acquired)."""
        pdir = self.require_project(project_id)
        path = pdir / "lock"
        with open(path, "a+") as fh:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh.fileno(), fcntl.LOCK_UN)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
