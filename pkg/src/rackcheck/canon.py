"""Canonical JSON serialization.

One serializer for everything that must be byte-stable across runs: memory
snapshots, trace lines, CLI output. Keys sorted, UTF-8 passthrough, NaN and
Inf rejected at write time.
"""

import json
from typing import Any

from .errors import InvalidValue


def canonical_dumps(value: Any, indent: int | None = None) -> str:
    """Serialize to canonical JSON. Raises InvalidValue on NaN/Inf or
    non-JSON types."""
    try:
        return json.dumps(value, sort_keys=True, ensure_ascii=False,
                          allow_nan=False, indent=indent,
                          separators=(",", ": ") if indent else (", ", ": "))
    except (ValueError, TypeError) as exc:
        raise InvalidValue(f"value is not canonically serializable: {exc}") from exc


def canonical_loads(text: str) -> Any:
    return json.loads(text)
