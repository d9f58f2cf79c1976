"""Operator command line: serve, ingest, steer, verify.

Output is line oriented and machine parseable ("key value" pairs or
fixed-position step lines). Engine errors print their stable code on
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .api_schemas import validate_payload
from .corrections import CorrectionPlan
from .errors import SteeringError
from .forest import Hyperparameters
from .manual_config import ManualConfiguration
from .orchestrator import Orchestrator, verify_project
from .store import ProjectStore


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SteeringError as exc:
        print(f"error {exc.code} {exc.message}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelsteer",
        description="Train, explain, and steer a tabular prediction model.",
    )
    sub = parser.add_subparsers(required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--data-dir", default="./data")
    p_serve.set_defaults(func=cmd_serve)

    p_ingest = sub.add_parser("ingest", help="create a project from a CSV")
    p_ingest.add_argument("csv_path")
    p_ingest.add_argument("schema_path")
    p_ingest.add_argument("hp_path", nargs="?")
    p_ingest.add_argument("--data-dir", default="./data")
    p_ingest.add_argument("--project-id")
    p_ingest.add_argument(
        "--seed-override", type=int,
        help="testing only: replace the hyperparameter seed",
    )
    p_ingest.set_defaults(func=cmd_ingest)

    p_steer = sub.add_parser("steer", help="apply a scripted steering sequence")
    p_steer.add_argument("project_id")
    p_steer.add_argument("script_path")
    p_steer.add_argument("--data-dir", default="./data")
    p_steer.set_defaults(func=cmd_steer)

    p_verify = sub.add_parser("verify", help="replay the journal and compare bundles")
    p_verify.add_argument("project_id")
    p_verify.add_argument("--data-dir", default="./data")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.data_dir), host="0.0.0.0", port=args.port)
    return 0


def cmd_ingest(args) -> int:
    csv_bytes = Path(args.csv_path).read_bytes()
    schema_doc = json.loads(Path(args.schema_path).read_text())
    validate_payload("schema_doc", schema_doc)
    hp_doc = {}
    if args.hp_path:
        hp_doc = json.loads(Path(args.hp_path).read_text())
        validate_payload("hyperparameters", hp_doc)
    if args.seed_override is not None:
        hp_doc = dict(hp_doc, seed=args.seed_override)
    hp = Hyperparameters.from_dict(hp_doc)

    orchestrator = Orchestrator(ProjectStore(args.data_dir))
    session = orchestrator.initialize_project(
        csv_bytes, schema_doc, hp, project_id=args.project_id
    )
    version = session.active
    print(f"project {session.project_id}")
    print(f"version {version.version_id}")
    print(f"accuracy {version.metrics.holdout_accuracy:.4f}")
    print(f"train_size {version.metrics.train_size}")
    print(f"n_features {version.metrics.n_features}")
    return 0


def cmd_steer(args) -> int:
    script = json.loads(Path(args.script_path).read_text())
    validate_payload("steering_script", script)
    store = ProjectStore(args.data_dir)
    orchestrator = Orchestrator(store)
    session = orchestrator.load_session(args.project_id)

    for i, step in enumerate(script, start=1):
        kind = step["type"]
        if kind == "manual":
            config = dict(step["config"])
            if config.get("base_version") is None:
                config["base_version"] = session.active_version
            version = orchestrator.steer_manual(
                session, ManualConfiguration.from_dict(config)
            )
        elif kind == "auto":
            plan_doc = dict(step["plan"])
            if plan_doc.get("base_version") is None:
                plan_doc["base_version"] = session.active_version
            if "seed" not in plan_doc:
                plan_doc["seed"] = store.load_hyperparameters(args.project_id).seed
            version = orchestrator.steer_automated(
                session, CorrectionPlan.from_dict(plan_doc)
            )
        else:
            version = orchestrator.rollback(session, int(step["target_version"]))
        delta = version.accuracy_delta if version.accuracy_delta is not None else 0.0
        print(
            f"step {i} {kind} version {version.version_id} "
            f"accuracy {version.metrics.holdout_accuracy:.4f} delta {delta:+.4f}"
        )
    return 0


def cmd_verify(args) -> int:
    store = ProjectStore(args.data_dir)
    results = verify_project(store, args.project_id)
    mismatches = 0
    for version_id, ok in results:
        print(f"version {version_id} {'OK' if ok else 'MISMATCH'}")
        if not ok:
            mismatches += 1
    if mismatches:
        print(f"MISMATCH {mismatches}")
        return 2
    print("OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
