"""Shared blackboard memory for the agent pipeline.

Current state is a key -> entry map with last-write-wins semantics; every
successful put is also appended to an immutable audit list so a trace can be
reconstructed after the fact. Values must survive canonical JSON round trips
(NaN/Inf and non-JSON types are rejected at write time).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .canon import canonical_dumps
from .errors import InvalidKey, ParseError, SnapshotError


class _AbsentType:
    """Marker distinct from None: None is a storable value, Absent is not."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Absent"

    def __bool__(self) -> bool:
        return False


ABSENT = _AbsentType()


@dataclass(frozen=True)
class MemoryEntry:
    key: str
    value: Any
    writer: str
    step: int
    seq: int


class StructuralMemory:
    """Key-value store with audit history.

    Single writer at a time (the pipeline is sequential); reads are safe from
    anywhere.
    """

    def __init__(self):
        self._current: dict[str, MemoryEntry] = {}
        self._audit: list[MemoryEntry] = []
        self._next_seq = 1

    def put(self, key: str, value: Any, writer: str, step: int) -> int:
        """Store value under key. Returns the sequence number assigned."""
        if not isinstance(key, str) or not key:
            raise InvalidKey(f"memory key must be a non-empty string, got {key!r}")
        canonical_dumps(value)  # reject NaN/Inf/non-JSON before storing
        entry = MemoryEntry(key=key, value=value, writer=writer,
                            step=step, seq=self._next_seq)
        self._next_seq += 1
        self._current[key] = entry
        self._audit.append(entry)
        return entry.seq

    def get(self, key: str) -> Any:
        """Current value for key, or ABSENT. Never raises for missing keys."""
        entry = self._current.get(key)
        return ABSENT if entry is None else entry.value

    def has(self, key: str) -> bool:
        return key in self._current

    def summary(self) -> dict:
        """Count and sorted key list of entries whose current value is non-null."""
        keys = sorted(k for k, e in self._current.items() if e.value is not None)
        return {"count": len(keys), "keys": keys}

    def data(self) -> dict[str, Any]:
        """Current key -> value map (insertion order of first write)."""
        return {k: e.value for k, e in self._current.items()}

    @property
    def audit(self) -> tuple[MemoryEntry, ...]:
        return tuple(self._audit)

    def save_snapshot(self, path: str | Path) -> int:
        """Write the current key -> value map as canonical JSON. Returns bytes
        written."""
        text = canonical_dumps(self.data(), indent=2) + "\n"
        payload = text.encode("utf-8")
        try:
            Path(path).write_bytes(payload)
        except OSError as exc:
            raise SnapshotError(f"cannot write snapshot {path}: {exc}") from exc
        return len(payload)

    @classmethod
    def load_snapshot(cls, path: str | Path) -> "StructuralMemory":
        """Rebuild a store from a snapshot file. Entries get writer='snapshot'
        and step=0; sequence numbers follow file key order."""
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"snapshot {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError(f"snapshot {path} must hold a JSON object")
        store = cls()
        for key, value in data.items():
            store.put(key, value, writer="snapshot", step=0)
        return store
