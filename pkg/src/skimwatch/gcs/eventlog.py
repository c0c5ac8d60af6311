"""Append-only event log: dense sequence numbers, line-delimited JSON.

One record per line, canonical key order, so a log replays and diffs
byte-stably. No database; the file is the source of truth across restarts.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

KINDS = ("TELEMETRY", "ALERT", "COMMAND", "ACK", "SYSTEM")


@dataclass(frozen=True)
class EventRecord:
    seq: int
    t_ms: int
    kind: str
    body: dict

    def to_line(self) -> str:
        return json.dumps({"seq": self.seq, "t_ms": self.t_ms,
                           "kind": self.kind, "body": self.body},
                          sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str) -> "EventRecord":
        data = json.loads(line)
        return cls(seq=data["seq"], t_ms=data["t_ms"], kind=data["kind"],
                   body=data["body"])

    def to_dict(self) -> dict:
        return {"seq": self.seq, "t_ms": self.t_ms, "kind": self.kind,
                "body": self.body}


class EventLog:
    """In-memory record list with optional append-only file persistence."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._records: list[EventRecord] = []
        self._fh = None
        self.path = Path(path) if path else None
        if self.path:
            if self.path.exists():
                self._load()
            self._fh = open(self.path, "a", encoding="utf-8")

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                record = EventRecord.from_line(line)
                if record.seq != len(self._records) + 1:
                    raise ValueError(
                        f"{self.path}:{i + 1}: seq {record.seq} breaks dense ordering")
                self._records.append(record)

    def append(self, kind: str, body: dict, t_ms: int) -> EventRecord:
        if kind not in KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            # seq is 1-based so query(since_seq=0) returns the whole log.
            record = EventRecord(seq=len(self._records) + 1, t_ms=t_ms, kind=kind,
                                 body=body)
            self._records.append(record)
            if self._fh:
                self._fh.write(record.to_line() + "\n")
                self._fh.flush()
            return record

    def query(self, since_seq: int = 0, limit: int = 1000) -> list[EventRecord]:
        """Records with seq > since_seq, ascending, at most limit."""
        if since_seq < 0:
            raise ValueError("since_seq must be >= 0")
        with self._lock:
            return self._records[since_seq:since_seq + limit]

    def records(self) -> list[EventRecord]:
        with self._lock:
            return list(self._records)

    @property
    def last_seq(self) -> int:
        with self._lock:
            return len(self._records)

    def close(self) -> None:
        with self._lock:
            if self._fh:
                self._fh.close()
                self._fh = None
