"""Message protocol, pipeline state machine, and trace log.

The pipeline walks a fixed eleven-state sequence; every message exchanged is
appended to a trace that serializes as JSON Lines. Traces carry no timestamps
or random ids, so two identical runs produce byte-identical files.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from .canon import canonical_dumps
from .errors import ExtractionFailed, ParseError, TerminalState


class PipelineState(enum.Enum):
    """One state per pipeline step, in execution order."""

    INIT = "Init"
    DECOMPOSE = "Decompose"
    SECTION_DESIGN = "SectionDesign"
    BUILDING_INFO = "BuildingInfo"
    SEISMIC_PARAMS = "SeismicParams"
    LOAD_CALC = "LoadCalc"
    UPDATE_SAA = "UpdateSAA"
    MODEL_GEN = "ModelGen"
    FE_ANALYSIS = "FEAnalysis"
    VERIFY = "Verify"
    FINAL_VERDICT = "FinalVerdict"


STATE_ORDER: tuple[PipelineState, ...] = tuple(PipelineState)


def state_for_step(step: int) -> PipelineState:
    if not 0 <= step < len(STATE_ORDER):
        raise ValueError(f"step {step} outside pipeline range")
    return STATE_ORDER[step]


def advance(state: PipelineState) -> PipelineState:
    """Successor state. Raises TerminalState past the final verdict."""
    idx = STATE_ORDER.index(state)
    if idx + 1 >= len(STATE_ORDER):
        raise TerminalState(f"{state.value} is the final pipeline state")
    return STATE_ORDER[idx + 1]


MESSAGE_KINDS = ("system", "instruction", "tool_call", "tool_result",
                 "assistant_text", "verdict", "failure")


@dataclass(frozen=True)
class ToolCall:
    name: str
    args: dict[str, Any] = field(default_factory=dict)

    def to_document(self) -> dict:
        return {"name": self.name, "args": self.args}


@dataclass(frozen=True)
class Message:
    sender: str
    recipient: str
    kind: str
    payload: Any
    round: int
    step: int

    def __post_init__(self):
        if self.kind not in MESSAGE_KINDS:
            raise ValueError(f"unknown message kind {self.kind!r}")
        if self.round < 1:
            raise ValueError("round starts at 1")

    def to_record(self) -> dict:
        return {
            "step": self.step,
            "state": state_for_step(self.step).value,
            "round": self.round,
            "kind": self.kind,
            "sender": self.sender,
            "recipient": self.recipient,
            "payload": self.payload,
        }


class TraceLog:
    """Append-only record list with JSON Lines serialization."""

    def __init__(self, records: list[dict] | None = None):
        self.records: list[dict] = list(records or [])

    def append(self, message: Message) -> dict:
        record = message.to_record()
        self.records.append(record)
        return record

    def append_record(self, record: dict) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[dict]:
        return iter(self.records)

    def to_jsonl(self) -> str:
        return "".join(canonical_dumps(r) + "\n" for r in self.records)

    def write_jsonl(self, path: str | Path) -> int:
        payload = self.to_jsonl().encode("utf-8")
        Path(path).write_bytes(payload)
        return len(payload)

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "TraceLog":
        records = []
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: bad trace line: {exc}") from exc
        return cls(records)

    def validate(self) -> list[str]:
        """Structural checks: steps never decrease, every tool_call gets
        exactly one tool_result before its step closes."""
        problems: list[str] = []
        last_step = -1
        open_calls = 0
        for i, rec in enumerate(self.records):
            step = rec.get("step", -1)
            if step < last_step:
                problems.append(f"record {i}: step {step} after step {last_step}")
            if step > last_step:
                if open_calls:
                    problems.append(
                        f"record {i}: step {last_step} closed with "
                        f"{open_calls} unanswered tool call(s)")
                open_calls = 0
                last_step = step
            kind = rec.get("kind")
            if kind == "tool_call":
                open_calls += 1
            elif kind == "tool_result":
                if open_calls == 0:
                    problems.append(f"record {i}: tool_result without tool_call")
                else:
                    open_calls -= 1
        if open_calls:
            problems.append(f"trace ends with {open_calls} unanswered tool call(s)")
        return problems

    def final_verdict(self) -> str | None:
        for rec in reversed(self.records):
            if rec.get("kind") == "verdict":
                return rec.get("payload")
        return None


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n?")
_BLOCK_COMMENT_RE = re.compile(r"/\*.*?\*/", re.DOTALL)
_LINE_COMMENT_RE = re.compile(r"^\s*//.*$", re.MULTILINE)
# inline comments only stripped when the remainder of the line is quote-free,
# so URLs inside string values survive
_INLINE_COMMENT_RE = re.compile(r"\s//[^\"\n]*$", re.MULTILINE)


def _scan_for_json(text: str) -> Any:
    decoder = json.JSONDecoder()
    for idx, ch in enumerate(text):
        if ch in "{[":
            try:
                value, _ = decoder.raw_decode(text, idx)
                return value
            except json.JSONDecodeError:
                continue
    raise ValueError("no decodable JSON value")


def extract_structured_payload(text: str) -> Any:
    """Pull the first complete JSON object or array out of a text blob.

    Tolerates surrounding prose, markdown code fences, and // or block
    comments. Raises ExtractionFailed (carrying the raw text) if nothing
    decodes. Deterministic: always the leftmost decodable value.
    """
    if not isinstance(text, str):
        raise ExtractionFailed("payload must be text", raw=repr(text))
    candidates = [text, _FENCE_RE.sub("", text)]
    cleaned = _BLOCK_COMMENT_RE.sub("", candidates[-1])
    cleaned = _LINE_COMMENT_RE.sub("", cleaned)
    cleaned = _INLINE_COMMENT_RE.sub("", cleaned)
    candidates.append(cleaned)
    for candidate in candidates:
        try:
            return _scan_for_json(candidate)
        except ValueError:
            continue
    raise ExtractionFailed("no JSON value found in text", raw=text)
