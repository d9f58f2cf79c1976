"""Canonical JSON serialization.

Every persisted or transmitted object goes through this module so that
the same value always produces the same bytes: keys sorted, no
whitespace, floats rendered with 17 significant digits (enough for an
exact float64 round trip). Content addresses are SHA-256 digests of
these bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


def dumps(obj: Any) -> bytes:
    """Serialize *obj* to canonical JSON bytes."""
    return _encode(obj).encode("utf-8")


def loads(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data)


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def digest_of(obj: Any) -> str:
    return digest(dumps(obj))


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, dict):
        parts = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"canonical JSON keys must be strings, got {key!r}")
            parts.append(json.dumps(key, ensure_ascii=True) + ":" + _encode(obj[key]))
        return "{" + ",".join(parts) + "}"
    # numpy scalars arrive from the engine; unwrap them explicitly
    item = getattr(obj, "item", None)
    if callable(item):
        return _encode(item())
    raise TypeError(f"cannot canonically serialize {type(obj).__name__}")


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("canonical JSON cannot hold NaN or infinity")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")
