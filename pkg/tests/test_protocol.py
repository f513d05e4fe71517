"""State machine order, message records, trace serialization, payload extraction."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rackcheck.errors import ExtractionFailed, ParseError, TerminalState
from rackcheck.protocol import (
    STATE_ORDER,
    Message,
    PipelineState,
    TraceLog,
    advance,
    extract_structured_payload,
    state_for_step,
)


def test_eleven_states_in_order():
    assert len(STATE_ORDER) == 11
    assert STATE_ORDER[0] is PipelineState.INIT
    assert STATE_ORDER[-1] is PipelineState.FINAL_VERDICT
    names = [s.value for s in STATE_ORDER]
    assert names == [
        "Init", "Decompose", "SectionDesign", "BuildingInfo", "SeismicParams",
        "LoadCalc", "UpdateSAA", "ModelGen", "FEAnalysis", "Verify",
        "FinalVerdict",
    ]


def test_advance_walks_the_chain():
    state = PipelineState.INIT
    seen = [state]
    for _ in range(10):
        state = advance(state)
        seen.append(state)
    assert tuple(seen) == STATE_ORDER
    with pytest.raises(TerminalState):
        advance(PipelineState.FINAL_VERDICT)


def test_state_for_step_bounds():
    assert state_for_step(0) is PipelineState.INIT
    assert state_for_step(10) is PipelineState.FINAL_VERDICT
    with pytest.raises(ValueError):
        state_for_step(11)
    with pytest.raises(ValueError):
        state_for_step(-1)


def test_message_record_shape():
    msg = Message(sender="A", recipient="B", kind="tool_call",
                  payload={"name": "t", "args": {}}, round=1, step=4)
    rec = msg.to_record()
    assert rec["state"] == "SeismicParams"
    assert rec["sender"] == "A" and rec["recipient"] == "B"
    assert rec["round"] == 1


def test_message_rejects_unknown_kind():
    with pytest.raises(ValueError):
        Message(sender="A", recipient="B", kind="gossip", payload=None,
                round=1, step=1)
    with pytest.raises(ValueError):
        Message(sender="A", recipient="B", kind="system", payload=None,
                round=0, step=1)


def test_trace_round_trip(tmp_path):
    log = TraceLog()
    log.append(Message("A", "B", "instruction", "go", 1, 1))
    log.append(Message("B", "T", "tool_call", {"name": "x", "args": {}}, 1, 1))
    log.append(Message("T", "B", "tool_result", {"ok": True}, 1, 1))
    path = tmp_path / "trace.jsonl"
    log.write_jsonl(path)
    back = TraceLog.from_jsonl(path)
    assert back.records == log.records
    # one record per line, each line canonical JSON
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    for line in lines:
        json.loads(line)


def test_trace_no_timestamps():
    log = TraceLog()
    log.append(Message("A", "B", "instruction", "go", 1, 1))
    text = log.to_jsonl()
    for banned in ("time", "stamp", "uuid", "date"):
        assert banned not in text


def test_from_jsonl_reports_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"step": 1}\nnot json\n', encoding="utf-8")
    with pytest.raises(ParseError, match=":2:"):
        TraceLog.from_jsonl(path)


def test_validate_flags_unanswered_call():
    log = TraceLog()
    log.append(Message("B", "T", "tool_call", {"name": "x", "args": {}}, 1, 1))
    assert log.validate()
    log.append(Message("T", "B", "tool_result", {"ok": True}, 1, 1))
    assert log.validate() == []


def test_validate_flags_step_regression():
    log = TraceLog()
    log.append(Message("A", "B", "instruction", "x", 1, 2))
    log.append(Message("A", "B", "instruction", "y", 1, 1))
    problems = log.validate()
    assert any("after step" in p for p in problems)


def test_final_verdict_last_wins():
    log = TraceLog()
    assert log.final_verdict() is None
    log.append(Message("A", "B", "verdict", "first", 1, 10))
    log.append(Message("A", "B", "verdict", "second", 2, 10))
    assert log.final_verdict() == "second"


# --- payload extraction -----------------------------------------------------

def test_extract_plain_object():
    assert extract_structured_payload('{"a": 1}') == {"a": 1}


def test_extract_with_prose_and_fence():
    text = 'Sure, here you go:\n```json\n{"a": [1, 2]}\n```\nDone.'
    assert extract_structured_payload(text) == {"a": [1, 2]}


def test_extract_with_comments():
    text = '{\n  // the answer\n  "a": 1\n}'
    assert extract_structured_payload(text) == {"a": 1}


def test_extract_leftmost_value():
    assert extract_structured_payload('{"a": 1} {"b": 2}') == {"a": 1}


def test_extract_failure_carries_raw():
    with pytest.raises(ExtractionFailed) as exc:
        extract_structured_payload("no structure here")
    assert exc.value.raw == "no structure here"
    with pytest.raises(ExtractionFailed):
        extract_structured_payload(42)


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-1000, 1000)
    | st.text(max_size=10),
    lambda inner: st.lists(inner, max_size=4)
    | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=12,
)


@given(json_values)
def test_extract_recovers_any_embedded_value(value):
    if not isinstance(value, (dict, list)):
        value = {"v": value}
    text = "prefix words " + json.dumps(value) + " suffix"
    assert extract_structured_payload(text) == value


@given(st.lists(st.integers(0, 10), min_size=1, max_size=30))
def test_step_monotone_traces_validate(steps):
    steps = sorted(steps)
    log = TraceLog()
    for step in steps:
        log.append(Message("A", "B", "instruction", "x", 1, step))
    assert log.validate() == []
