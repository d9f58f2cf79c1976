"""Loading and enforcement of the shipped JSON schemas.

The schema documents under ``modelsteer/schemas/`` are the frozen API
contract: the service validates request payloads against them, and the
test suite validates every response against them.
"""

from __future__ import annotations

import functools
import json
from importlib.resources import files
from typing import Any

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from .errors import SteeringError

SCHEMA_BASE = "https://modelsteer.dev/schemas/"


class InvalidPayload(SteeringError):
    code = "invalid_payload"


@functools.lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    path = files("modelsteer") / "schemas" / f"{name}.schema.json"
    return json.loads(path.read_text())


@functools.lru_cache(maxsize=None)
def _registry() -> Registry:
    resources = []
    for entry in (files("modelsteer") / "schemas").iterdir():
        if entry.name.endswith(".schema.json"):
            doc = json.loads(entry.read_text())
            resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


@functools.lru_cache(maxsize=None)
def validator(name: str) -> Draft202012Validator:
    return Draft202012Validator(load_schema(name), registry=_registry())


def validate_payload(name: str, payload: Any) -> None:
    """Raise InvalidPayload when *payload* violates the named schema."""
    errors = sorted(validator(name).iter_errors(payload), key=lambda e: e.json_path)
    if errors:
        first = errors[0]
        raise InvalidPayload(
            f"payload violates schema {name!r}: {first.message}",
            schema=name,
            json_path=first.json_path,
        )
