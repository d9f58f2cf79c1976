"""The steering loop: configure data, retrain, re-explain, version, roll back.

Every successful steering action appends one version to the project's
journal and makes it active. Retraining always reuses the project's
original seed so the reported accuracy delta isolates the data change
from training randomness. Failed actions leave the journal untouched.

Version timestamps are logical (the version id itself): the whole
pipeline is deterministic, so identical action sequences produce
byte-identical journals wherever they are replayed.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from typing import Any, Mapping

from .bundle import build_bundle
from .corrections import CorrectionPlan, CorrectionRecord, DataIssue, apply_corrections, detect_issues
from .dataset import Dataset, ingest_csv
from .errors import StaleBaseVersion, UnknownProject, UnknownVersion
from .forest import Hyperparameters, ModelMetrics, model_digest, train
from .manual_config import GuardrailPolicy, ManualConfiguration, apply_manual
from .store import ProjectStore

CAUSE_INITIAL = "initial"
CAUSE_MANUAL = "manual"
CAUSE_AUTOMATED = "automated"
CAUSE_ROLLBACK = "rollback"


@dataclass(frozen=True)
class SessionVersion:
    """One committed step of the steering history."""

    version_id: int
    parent: int | None
    cause: str
    config: dict | None
    dataset_snapshot_id: str
    model_ref: str
    bundle_ref: str
    metrics: ModelMetrics
    accuracy_delta: float | None
    summary: str
    created_at: int
    correction_records: tuple[CorrectionRecord, ...] = ()

    def to_record(self) -> dict:
        record = {
            "v": 1,
            "version_id": self.version_id,
            "parent": self.parent,
            "cause": self.cause,
            "config": self.config,
            "dataset_snapshot_id": self.dataset_snapshot_id,
            "model_ref": self.model_ref,
            "bundle_ref": self.bundle_ref,
            "metrics": self.metrics.to_dict(),
            "accuracy_delta": self.accuracy_delta,
            "summary": self.summary,
            "created_at": self.created_at,
        }
        if self.cause == CAUSE_AUTOMATED:
            record["correction_records"] = [
                r.to_dict() for r in self.correction_records
            ]
        return record

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "SessionVersion":
        return cls(
            version_id=int(record["version_id"]),
            parent=(int(record["parent"]) if record["parent"] is not None else None),
            cause=record["cause"],
            config=record["config"],
            dataset_snapshot_id=record["dataset_snapshot_id"],
            model_ref=record["model_ref"],
            bundle_ref=record["bundle_ref"],
            metrics=ModelMetrics.from_dict(record["metrics"]),
            accuracy_delta=record["accuracy_delta"],
            summary=record["summary"],
            created_at=int(record["created_at"]),
            correction_records=tuple(
                CorrectionRecord.from_dict(r)
                for r in record.get("correction_records", [])
            ),
        )

    def summary_dict(self) -> dict:
        return {
            "version_id": self.version_id,
            "parent": self.parent,
            "cause": self.cause,
            "accuracy": self.metrics.holdout_accuracy,
            "accuracy_delta": self.accuracy_delta,
            "train_size": self.metrics.train_size,
            "n_features": self.metrics.n_features,
            "summary": self.summary,
        }


@dataclass
class SteeringSession:
    """Append-only version chain for one project; the last version is active."""

    project_id: str
    versions: list[SessionVersion]

    @property
    def active_version(self) -> int:
        return self.versions[-1].version_id

    @property
    def active(self) -> SessionVersion:
        return self.versions[-1]

    def find(self, version_id: int) -> SessionVersion:
        for version in self.versions:
            if version.version_id == version_id:
                return version
        raise UnknownVersion(f"no version {version_id} in project {self.project_id}")


class Orchestrator:
    """Engine facade bound to a store; one instance serves many projects."""

    def __init__(self, store: ProjectStore, policy: GuardrailPolicy | None = None):
        self.store = store
        self.policy = policy or GuardrailPolicy()

    # -- session lifecycle ---------------------------------------------------

    def initialize_project(
        self,
        csv_bytes: bytes,
        schema_doc: Mapping[str, Any],
        hp: Hyperparameters,
        project_id: str | None = None,
    ) -> SteeringSession:
        """Ingest, train, explain, and record version 1.

        Nothing is persisted until the whole pipeline has succeeded.
        """
        ds = ingest_csv(csv_bytes, schema_doc)
        model, metrics = train(ds, hp)
        bundle = build_bundle(model, metrics, ds)

        project_id = project_id or uuid.uuid4().hex[:12]
        self.store.create_project(project_id, dict(schema_doc), hp)
        version = self._commit(
            project_id,
            version_id=1,
            parent=None,
            cause=CAUSE_INITIAL,
            config=None,
            ds=ds,
            model=model,
            metrics=metrics,
            bundle_payload=bundle.to_payload(),
            accuracy_delta=None,
            summary=f"initial training on {ds.n_rows} rows, {ds.n_features} features",
        )
        return SteeringSession(project_id=project_id, versions=[version])

    def load_session(self, project_id: str) -> SteeringSession:
        records = self.store.read_journal(project_id)
        if not records:
            raise UnknownProject(f"project {project_id!r} has no committed versions")
        return SteeringSession(
            project_id=project_id,
            versions=[SessionVersion.from_record(r) for r in records],
        )

    # -- steering actions ------------------------------------------------------

    def steer_manual(
        self, session: SteeringSession, cfg: ManualConfiguration
    ) -> SessionVersion:
        if cfg.base_version != session.active_version:
            raise StaleBaseVersion(
                f"configuration targets version {cfg.base_version}, "
                f"active is {session.active_version}"
            )
        with self.store.lock(session.project_id):
            base = session.active
            ds = self.store.get_snapshot(session.project_id, base.dataset_snapshot_id)
            configured = apply_manual(cfg, ds, self.policy)
            hp = self.store.load_hyperparameters(session.project_id)
            model, metrics = train(configured, hp)
            bundle = build_bundle(
                model, metrics, configured,
                previous_accuracy=base.metrics.holdout_accuracy,
            )
            version = self._commit(
                session.project_id,
                version_id=base.version_id + 1,
                parent=base.version_id,
                cause=CAUSE_MANUAL,
                config=cfg.to_dict(),
                ds=configured,
                model=model,
                metrics=metrics,
                bundle_payload=bundle.to_payload(),
                accuracy_delta=metrics.holdout_accuracy - base.metrics.holdout_accuracy,
                summary=(
                    f"manual: {len(cfg.included_features)} features, "
                    f"{len(cfg.ranges)} range filter(s)"
                ),
            )
        session.versions.append(version)
        return version

    def steer_automated(
        self, session: SteeringSession, plan: CorrectionPlan
    ) -> SessionVersion:
        if plan.base_version != session.active_version:
            raise StaleBaseVersion(
                f"plan targets version {plan.base_version}, "
                f"active is {session.active_version}"
            )
        with self.store.lock(session.project_id):
            base = session.active
            ds = self.store.get_snapshot(session.project_id, base.dataset_snapshot_id)
            corrected, records = apply_corrections(plan, ds)
            hp = self.store.load_hyperparameters(session.project_id)
            model, metrics = train(corrected, hp)
            bundle = build_bundle(
                model, metrics, corrected,
                previous_accuracy=base.metrics.holdout_accuracy,
            )
            version = self._commit(
                session.project_id,
                version_id=base.version_id + 1,
                parent=base.version_id,
                cause=CAUSE_AUTOMATED,
                config=plan.to_dict(),
                ds=corrected,
                model=model,
                metrics=metrics,
                bundle_payload=bundle.to_payload(),
                accuracy_delta=metrics.holdout_accuracy - base.metrics.holdout_accuracy,
                summary="auto: " + "+".join(plan.selected_kinds),
                correction_records=tuple(records),
            )
        session.versions.append(version)
        return version

    def rollback(self, session: SteeringSession, target_version: int) -> SessionVersion:
        target = session.find(target_version)
        with self.store.lock(session.project_id):
            base = session.active
            version = SessionVersion(
                version_id=base.version_id + 1,
                parent=base.version_id,
                cause=CAUSE_ROLLBACK,
                config={"target_version": target_version},
                dataset_snapshot_id=target.dataset_snapshot_id,
                model_ref=target.model_ref,
                bundle_ref=target.bundle_ref,
                metrics=target.metrics,
                accuracy_delta=(
                    target.metrics.holdout_accuracy - base.metrics.holdout_accuracy
                ),
                summary=f"rollback to version {target_version}",
                created_at=base.version_id + 1,
            )
            self.store.append_version(session.project_id, version.to_record())
        session.versions.append(version)
        return version

    # -- reads -------------------------------------------------------------------

    def history(self, session: SteeringSession) -> list[dict]:
        return [v.summary_dict() for v in session.versions]

    def issues(self, session: SteeringSession) -> list[DataIssue]:
        ds = self.store.get_snapshot(
            session.project_id, session.active.dataset_snapshot_id
        )
        hp = self.store.load_hyperparameters(session.project_id)
        return detect_issues(ds, hp)

    def bundle_bytes(
        self, session: SteeringSession, version_id: int | None = None
    ) -> bytes:
        version = session.active if version_id is None else session.find(version_id)
        return self.store.get_bundle_bytes(session.project_id, version.bundle_ref)

    # -- internals ------------------------------------------------------------------

    def _commit(
        self,
        project_id: str,
        *,
        version_id: int,
        parent: int | None,
        cause: str,
        config: dict | None,
        ds: Dataset,
        model,
        metrics: ModelMetrics,
        bundle_payload: dict,
        accuracy_delta: float | None,
        summary: str,
        correction_records: tuple[CorrectionRecord, ...] = (),
    ) -> SessionVersion:
        snapshot_id = self.store.put_snapshot(project_id, ds)
        model_ref = self.store.put_model(project_id, model)
        bundle_ref = self.store.put_bundle(project_id, bundle_payload)
        version = SessionVersion(
            version_id=version_id,
            parent=parent,
            cause=cause,
            config=config,
            dataset_snapshot_id=snapshot_id,
            model_ref=model_ref,
            bundle_ref=bundle_ref,
            metrics=metrics,
            accuracy_delta=accuracy_delta,
            summary=summary,
            created_at=version_id,
            correction_records=correction_records,
        )
        self.store.append_version(project_id, version.to_record())
        return version


def verify_project(store: ProjectStore, project_id: str) -> list[tuple[int, bool]]:
    """Replay every version from the journal and compare regenerated state.

    For trained versions the config payload is re-applied to the parent
    snapshot, the model retrained, and the bundle rebuilt; ok means the
    snapshot id, model digest, and bundle bytes all match the stored
    ones. Rollback versions must reference exactly their target's blobs.
    """
    from . import canonical  # local import to keep module deps one-way

    # committed configs already passed validation; replay must not re-gate them
    permissive = GuardrailPolicy(
        max_row_drop_fraction=1.0, min_features=1, min_rows=1,
        warn_row_drop_fraction=1.0,
    )
    records = [SessionVersion.from_record(r) for r in store.read_journal(project_id)]
    hp = store.load_hyperparameters(project_id)
    by_id = {v.version_id: v for v in records}
    results = []
    for version in records:
        if version.cause == CAUSE_ROLLBACK:
            target = by_id[version.config["target_version"]]
            ok = (
                version.dataset_snapshot_id == target.dataset_snapshot_id
                and version.model_ref == target.model_ref
                and version.bundle_ref == target.bundle_ref
            )
            results.append((version.version_id, ok))
            continue

        if version.cause == CAUSE_INITIAL:
            ds = store.get_snapshot(project_id, version.dataset_snapshot_id)
            snapshot_ok = True
        else:
            parent = by_id[version.parent]
            base_ds = store.get_snapshot(project_id, parent.dataset_snapshot_id)
            if version.cause == CAUSE_MANUAL:
                cfg = ManualConfiguration.from_dict(version.config)
                ds = apply_manual(cfg, base_ds, permissive)
            else:
                plan = CorrectionPlan.from_dict(version.config)
                ds, _ = apply_corrections(plan, base_ds)
            snapshot_ok = ds.snapshot_id == version.dataset_snapshot_id

        model, metrics = train(ds, hp)
        previous = None
        if version.parent is not None:
            previous = by_id[version.parent].metrics.holdout_accuracy
        bundle = build_bundle(model, metrics, ds, previous_accuracy=previous)
        regenerated = canonical.dumps(bundle.to_payload())
        stored = store.get_bundle_bytes(project_id, version.bundle_ref)
        ok = (
            snapshot_ok
            and regenerated == stored
            and model_digest(model) == version.model_ref
        )
        results.append((version.version_id, ok))
    return results
