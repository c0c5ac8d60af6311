"""Append-only event log: dense seq, pagination, persistence round-trip."""

import pytest

from skimwatch.gcs.eventlog import EventLog, EventRecord


def test_seq_starts_at_one_and_is_dense():
    log = EventLog(None)
    for i in range(5):
        record = log.append("SYSTEM", {"i": i}, t_ms=i)
        assert record.seq == i + 1
    assert log.last_seq == 5


def test_query_semantics():
    log = EventLog(None)
    for i in range(10):
        log.append("TELEMETRY", {"i": i}, t_ms=i)
    assert [r.seq for r in log.query(since_seq=0)] == list(range(1, 11))
    assert log.query(since_seq=10) == []
    assert [r.seq for r in log.query(since_seq=4, limit=3)] == [5, 6, 7]
    with pytest.raises(ValueError):
        log.query(since_seq=-1)


def test_pagination_concatenates_to_full_log():
    log = EventLog(None)
    for i in range(57):
        log.append("TELEMETRY", {"i": i}, t_ms=i)
    pages = []
    since = 0
    while True:
        page = log.query(since, limit=10)
        if not page:
            break
        pages.extend(page)
        since = page[-1].seq
    assert pages == log.records()


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        EventLog(None).append("NOISE", {}, t_ms=0)


def test_persistence_round_trip(tmp_path):
    path = tmp_path / "events.jsonl"
    log = EventLog(path)
    log.append("TELEMETRY", {"type": "POSITION", "x": 1.5}, t_ms=100)
    log.append("ALERT", {"type": "FENCEALERT", "count": 1}, t_ms=200)
    log.close()
    first_bytes = path.read_bytes()

    reopened = EventLog(path)
    assert reopened.records() == log.records()
    reopened.append("SYSTEM", {"type": "SERVICE_START"}, t_ms=300)
    reopened.close()
    # Re-serializing the first two lines must be byte-identical.
    assert path.read_bytes().startswith(first_bytes)

    again = EventLog(path)
    assert [r.seq for r in again.records()] == [1, 2, 3]
    again.close()


def test_corrupt_seq_rejected(tmp_path):
    path = tmp_path / "events.jsonl"
    record = EventRecord(seq=5, t_ms=0, kind="SYSTEM", body={})
    path.write_text(record.to_line() + "\n")
    with pytest.raises(ValueError):
        EventLog(path)


def test_line_serialization_is_canonical():
    record = EventRecord(seq=1, t_ms=42, kind="ALERT", body={"b": 2, "a": 1})
    line = record.to_line()
    assert line == '{"body":{"a":1,"b":2},"kind":"ALERT","seq":1,"t_ms":42}'
    assert EventRecord.from_line(line) == record
