"""HTTP/JSON boundary between the dashboard and the steering engine.

Every response body is the canonical serialization of an engine result,
so byte-level determinism survives the wire. Engine errors map to a
stable error envelope: the code string mirrors the engine error class
and the HTTP status is fixed per code (400 validation, 404 unknown
resource, 409 stale or guardrail conflicts, 500 internal).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from . import canonical
from .api_schemas import InvalidPayload, validate_payload
from .corrections import CorrectionPlan
from .errors import SteeringError, UnknownProject
from .forest import Hyperparameters
from .manual_config import GuardrailPolicy, ManualConfiguration
from .orchestrator import Orchestrator
from .store import ProjectStore

DEFAULT_PORT = 8080
DEFAULT_DATA_DIR = "./data"

_STATUS_BY_CODE = {
    "unknown_project": 404,
    "unknown_version": 404,
    "stale_base_version": 409,
    "stale_issue": 409,
    "min_features": 409,
    "min_rows": 409,
    "max_row_drop": 409,
    "corrupt_snapshot": 500,
    "dangling_reference": 500,
    "journal_parse_error": 500,
    "internal": 500,
}


def _status_for(code: str) -> int:
    return _STATUS_BY_CODE.get(code, 400)


def _canonical_response(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=canonical.dumps(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error_response(exc: SteeringError) -> Response:
    body = {"error": {"code": exc.code, "message": exc.message}}
    if exc.details:
        body["error"]["details"] = _jsonable(exc.details)
    return _canonical_response(body, _status_for(exc.code))


def _jsonable(obj: Any) -> Any:
    try:
        canonical.dumps(obj)
        return obj
    except (TypeError, ValueError):
        return json.loads(json.dumps(obj, default=str))


def create_app(
    data_dir: str | Path | None = None,
    policy: GuardrailPolicy | None = None,
) -> FastAPI:
    """Build the service around a project store rooted at *data_dir*."""
    root = Path(data_dir or os.environ.get("STEER_DATA_DIR", DEFAULT_DATA_DIR))
    store = ProjectStore(root)
    orchestrator = Orchestrator(store, policy=policy)
    app = FastAPI(title="modelsteer", version="0.1.0")

    ui_origin = os.environ.get("STEER_UI_ORIGIN")
    if ui_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[ui_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(SteeringError)
    async def steering_error_handler(_request: Request, exc: SteeringError):
        return _error_response(exc)

    def load_session(project_id: str):
        if not store.project_exists(project_id):
            raise UnknownProject(f"no project {project_id!r}")
        return orchestrator.load_session(project_id)

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        form = await request.form()
        csv_bytes = await _read_part(form, "csv", required=True)
        schema_doc = _parse_json_upload(
            await _read_part(form, "schema", required=True), "schema"
        )
        validate_payload("schema_doc", schema_doc)
        hp_bytes = await _read_part(form, "hyperparameters", required=False)
        hp_doc: dict = {}
        if hp_bytes is not None:
            hp_doc = _parse_json_upload(hp_bytes, "hyperparameters")
            validate_payload("hyperparameters", hp_doc)
        hp = Hyperparameters.from_dict(hp_doc)
        session = orchestrator.initialize_project(csv_bytes, schema_doc, hp)
        return _canonical_response(
            {
                "project_id": session.project_id,
                "version": session.active.summary_dict(),
            },
            status_code=201,
        )

    @app.get("/projects/{project_id}/bundle")
    async def get_bundle(project_id: str):
        session = load_session(project_id)
        return Response(
            content=orchestrator.bundle_bytes(session),
            media_type="application/json",
        )

    @app.get("/projects/{project_id}/issues")
    async def get_issues(project_id: str):
        session = load_session(project_id)
        issues = orchestrator.issues(session)
        return _canonical_response(
            {
                "base_version": session.active_version,
                "issues": [i.to_dict() for i in issues],
            }
        )

    @app.put("/projects/{project_id}/config/manual")
    async def put_manual(project_id: str, request: Request):
        payload = _parse_json_body(await request.body())
        validate_payload("manual_config", payload)
        session = load_session(project_id)
        cfg = ManualConfiguration.from_dict(payload)
        version = orchestrator.steer_manual(session, cfg)
        return _canonical_response({"version": version.summary_dict()})

    @app.post("/projects/{project_id}/config/auto")
    async def post_auto(project_id: str, request: Request):
        payload = _parse_json_body(await request.body())
        validate_payload("correction_plan", payload)
        session = load_session(project_id)
        if "seed" not in payload:
            # default to the training seed so the committed delta equals
            # the sandbox impact quoted on the issues screen
            hp = store.load_hyperparameters(project_id)
            payload = dict(payload, seed=hp.seed)
        plan = CorrectionPlan.from_dict(payload)
        version = orchestrator.steer_automated(session, plan)
        return _canonical_response(
            {
                "version": version.summary_dict(),
                "correction_records": [
                    r.to_dict() for r in version.correction_records
                ],
            }
        )

    @app.post("/projects/{project_id}/rollback")
    async def post_rollback(project_id: str, request: Request):
        payload = _parse_json_body(await request.body())
        validate_payload("rollback", payload)
        session = load_session(project_id)
        version = orchestrator.rollback(session, int(payload["version_id"]))
        return _canonical_response({"version": version.summary_dict()})

    @app.get("/projects/{project_id}/versions")
    async def get_versions(project_id: str):
        session = load_session(project_id)
        return _canonical_response({"versions": orchestrator.history(session)})

    return app


async def _read_part(form, name: str, required: bool) -> bytes | None:
    part = form.get(name)
    if part is None:
        if required:
            raise InvalidPayload(f"multipart body is missing the {name!r} part")
        return None
    if isinstance(part, str):
        return part.encode("utf-8")
    return await part.read()


def _parse_json_body(body: bytes) -> Any:
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise InvalidPayload(f"request body is not valid JSON: {exc}") from None


def _parse_json_upload(data: bytes, part: str) -> Any:
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise InvalidPayload(f"{part} part is not valid JSON: {exc}") from None


def main() -> None:
    import uvicorn

    port = int(os.environ.get("STEER_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
