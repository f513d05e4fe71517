"""Shared memory store: last-write-wins reads, append-only audit, snapshots."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rackcheck.errors import InvalidKey, InvalidValue, ParseError
from rackcheck.memory import ABSENT, StructuralMemory


def test_get_missing_is_absent():
    mem = StructuralMemory()
    assert mem.get("nothing") is ABSENT
    assert not mem.has("nothing")


def test_absent_is_falsy_and_not_none():
    assert not ABSENT
    assert ABSENT is not None


def test_last_write_wins():
    mem = StructuralMemory()
    mem.put("k", 1, writer="A", step=1)
    mem.put("k", 2, writer="B", step=2)
    assert mem.get("k") == 2


def test_audit_keeps_every_write():
    mem = StructuralMemory()
    mem.put("k", 1, writer="A", step=1)
    mem.put("k", 2, writer="B", step=2)
    entries = [e for e in mem.audit if e.key == "k"]
    assert [e.value for e in entries] == [1, 2]
    assert [e.writer for e in entries] == ["A", "B"]
    # sequence numbers strictly increase
    seqs = [e.seq for e in mem.audit]
    assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)


def test_summary_counts_non_null_sorted():
    mem = StructuralMemory()
    mem.put("b", 1, writer="A", step=1)
    mem.put("a", 2, writer="A", step=1)
    mem.put("c", None, writer="A", step=1)
    s = mem.summary()
    assert s["count"] == 2
    assert s["keys"] == ["a", "b"]


def test_bad_key_rejected():
    mem = StructuralMemory()
    with pytest.raises(InvalidKey):
        mem.put("", 1, writer="A", step=1)


def test_non_json_value_rejected():
    mem = StructuralMemory()
    with pytest.raises(InvalidValue):
        mem.put("k", object(), writer="A", step=1)
    with pytest.raises(InvalidValue):
        mem.put("k", float("nan"), writer="A", step=1)


def test_snapshot_round_trip(tmp_path):
    mem = StructuralMemory()
    mem.put("alpha", {"x": [1, 2]}, writer="A", step=1)
    mem.put("beta", "text", writer="B", step=2)
    path = tmp_path / "snap.json"
    mem.save_snapshot(path)
    loaded = StructuralMemory.load_snapshot(path)
    assert loaded.data() == mem.data()


def test_snapshot_bytes_stable(tmp_path):
    mem = StructuralMemory()
    mem.put("z", 1, writer="A", step=1)
    mem.put("a", 2, writer="A", step=1)
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    mem.save_snapshot(p1)
    mem.save_snapshot(p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_snapshot_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        StructuralMemory.load_snapshot(path)


keys = st.text(alphabet="abcdefgh_", min_size=1, max_size=6)
values = st.integers(-100, 100) | st.text(max_size=8) | st.none()


@given(st.lists(st.tuples(keys, values), max_size=30))
def test_data_equals_final_writes(writes):
    mem = StructuralMemory()
    expected = {}
    for i, (key, value) in enumerate(writes):
        mem.put(key, value, writer="w", step=1)
        expected[key] = value
    assert mem.data() == expected
    assert len(mem.audit) == len(writes)


@given(st.lists(st.tuples(keys, values), min_size=1, max_size=20))
def test_summary_matches_data(writes):
    mem = StructuralMemory()
    for key, value in writes:
        mem.put(key, value, writer="w", step=1)
    s = mem.summary()
    non_null = sorted(k for k, v in mem.data().items() if v is not None)
    assert s["keys"] == non_null
    assert s["count"] == len(non_null)
