"""GCS state store: latest snapshot, ingest path, subscriptions, bot link.

Ingest is single-writer per connection but safe under concurrent readers;
subscriber queues are bounded and never block ingest (drop-oldest with an
explicit gap marker). Snapshot rebuilds from logged bodies use the same
apply routine as live ingest, so a replayed log reconstructs the identical
snapshot.
"""

from __future__ import annotations

import copy
import math
import threading
import time
from collections import deque
from dataclasses import asdict

from .. import nav, protocol
from .eventlog import EventLog, EventRecord

LINK_TIMEOUT_MS = 3000
ACK_TIMEOUT_S = 2.0
KNOWN_SYS_IDS = {protocol.SYS_ID_BOT, protocol.SYS_ID_FENCE, protocol.SYS_ID_GCS}

GAP_MARKER = {"kind": "system", "event": {"kind": "SYSTEM", "body": {"type": "GAP"}}}

_TELEMETRY_TYPES = (protocol.Heartbeat, protocol.Position, protocol.Power,
                    protocol.TrashStatus)
_ACK_TYPES = (protocol.MissionAck, protocol.CommandAck)


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


def _empty_snapshot() -> dict:
    return {
        "last_heartbeat_ms": None,
        "mode": None,
        "armed": False,
        "position": None,   # {"t_ms", "x", "y", "heading", "speed"}
        "power": None,      # {"soc_wh", "solar_w", "load_w"}
        "trash": None,      # {"payload_kg", "items"}
        "alert_count": 0,
    }


class Subscription:
    """Bounded delivery queue; overflow drops oldest behind a gap marker."""

    def __init__(self, sub_id: int, capacity: int = 1024, created_at: int = 0):
        self.id = sub_id
        self.created_at = created_at
        self.capacity = capacity
        self._queue: deque = deque()
        self._cond = threading.Condition()
        self.closed = False

    def push(self, event: dict) -> None:
        with self._cond:
            if len(self._queue) >= self.capacity:
                while len(self._queue) >= self.capacity:
                    self._queue.popleft()
                if not self._queue or self._queue[0] is not GAP_MARKER:
                    self._queue.appendleft(GAP_MARKER)
            self._queue.append(event)
            self._cond.notify()

    def pop(self, timeout: float | None = None) -> dict | None:
        with self._cond:
            if not self._queue and not self.closed:
                self._cond.wait(timeout)
            if self._queue:
                return self._queue.popleft()
            return None

    def close(self) -> None:
        with self._cond:
            self.closed = True
            self._cond.notify_all()


class GcsCore:
    """Terminates decoded protocol traffic and serves operator queries."""

    def __init__(self, log: EventLog | None = None, clock_ms=None,
                 telemetry_fanout_hz: float = 2.0, telemetry_log_every: int = 1):
        if telemetry_log_every < 1:
            raise ValueError("telemetry_log_every must be >= 1")
        self.log = log if log is not None else EventLog(None)
        self._clock = clock_ms or _now_ms
        self._lock = threading.RLock()
        self._snapshot = _empty_snapshot()
        self._subs: dict[int, Subscription] = {}
        self._next_sub_id = 1
        self._fanout_interval_ms = 1000.0 / telemetry_fanout_hz
        self._last_telemetry_fanout = -float("inf")
        self._telemetry_log_every = telemetry_log_every
        self._telemetry_seen = 0
        self._bot_send = None          # callable(bytes) when a bot link is up
        self._seq = 0
        self._submit_lock = threading.Lock()
        self._ack_cond = threading.Condition(self._lock)
        self._pending_mission_ack: int | None = None
        self._pending_command_ack: tuple[int, int] | None = None
        self._rebuild_from_log()

    # -- ingest ---------------------------------------------------------

    def ingest(self, decoded: protocol.Decoded,
               t_ms: int | None = None) -> EventRecord | None:
        """Apply one decoded message: snapshot, event log, fanout.

        Returns the logged record, or None when telemetry log decimation
        swallowed it (the snapshot always updates; alerts are never
        decimated).
        """
        t_ms = self._clock() if t_ms is None else t_ms
        msg = decoded.msg
        body = {"type": type(msg).__name__.upper(), "sys_id": decoded.sys_id,
                "seq": decoded.seq, **asdict(msg)}

        if decoded.sys_id not in KNOWN_SYS_IDS:
            kind = "SYSTEM"
            body = {"type": "UNKNOWN_SYS_ID", "sys_id": decoded.sys_id,
                    "msg": body}
        elif isinstance(msg, protocol.FenceAlert):
            kind = "ALERT"
        elif isinstance(msg, _ACK_TYPES):
            kind = "ACK"
        elif isinstance(msg, _TELEMETRY_TYPES):
            kind = "TELEMETRY"
        else:
            kind = "COMMAND"  # mission/command traffic observed on the wire

        with self._lock:
            self._apply_body(kind, body, t_ms)
            if isinstance(msg, protocol.MissionAck):
                self._pending_mission_ack = msg.result
                self._ack_cond.notify_all()
            elif isinstance(msg, protocol.CommandAck):
                self._pending_command_ack = (msg.cmd, msg.result)
                self._ack_cond.notify_all()
            if kind == "TELEMETRY":
                self._telemetry_seen += 1
                if (self._telemetry_seen - 1) % self._telemetry_log_every:
                    return None
            record = self.log.append(kind, body, t_ms)
            self._fanout(record, t_ms)
        return record

    def _apply_body(self, kind: str, body: dict, t_ms: int) -> None:
        snap = self._snapshot
        btype = body.get("type")
        if kind == "TELEMETRY":
            if btype == "HEARTBEAT":
                snap["last_heartbeat_ms"] = t_ms
                snap["mode"] = body["mode"]
                snap["armed"] = bool(body["armed"])
            elif btype == "POSITION":
                snap["position"] = {k: body[k] for k in
                                    ("t_ms", "x", "y", "heading", "speed")}
            elif btype == "POWER":
                snap["power"] = {k: body[k] for k in ("soc_wh", "solar_w", "load_w")}
            elif btype == "TRASHSTATUS":
                snap["trash"] = {"payload_kg": body["payload_kg"],
                                 "items": body["items"]}
        elif kind == "ALERT" and btype == "FENCEALERT":
            snap["alert_count"] = body["count"]

    def _fanout(self, record: EventRecord, t_ms: int) -> None:
        if record.kind == "ALERT":
            payload = {"kind": "alert", "event": record.to_dict()}
        elif record.kind == "TELEMETRY":
            if t_ms - self._last_telemetry_fanout < self._fanout_interval_ms:
                return
            self._last_telemetry_fanout = t_ms
            payload = {"kind": "telemetry", "event": record.to_dict()}
        else:
            return
        for sub in self._subs.values():
            sub.push(payload)

    def _rebuild_from_log(self) -> None:
        for record in self.log.records():
            self._apply_body(record.kind, record.body, record.t_ms)

    @staticmethod
    def snapshot_from_records(records, now_ms: int = 0) -> dict:
        """Replay a recorded event log into a snapshot (record/replay oracle)."""
        core = GcsCore(EventLog(None))
        for record in records:
            core._apply_body(record.kind, record.body, record.t_ms)
        return core.query_state(now_ms=now_ms)

    # -- queries ----------------------------------------------------------

    def query_state(self, now_ms: int | None = None) -> dict:
        now_ms = self._clock() if now_ms is None else now_ms
        with self._lock:
            snap = copy.deepcopy(self._snapshot)
        hb = snap["last_heartbeat_ms"]
        snap["link_ok"] = hb is not None and (now_ms - hb) <= LINK_TIMEOUT_MS
        return snap

    def query_events(self, since_seq: int = 0, limit: int = 1000) -> list[EventRecord]:
        return self.log.query(since_seq, limit)

    def subscribe(self, capacity: int = 1024) -> Subscription:
        with self._lock:
            sub = Subscription(self._next_sub_id, capacity=capacity,
                               created_at=self._clock())
            self._next_sub_id += 1
            self._subs[sub.id] = sub
            return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            self._subs.pop(sub.id, None)
        sub.close()

    @property
    def subscriber_count(self) -> int:
        with self._lock:
            return len(self._subs)

    # -- bot link ----------------------------------------------------------

    def attach_bot_sender(self, send) -> None:
        with self._lock:
            self._bot_send = send

    def detach_bot_sender(self, send) -> None:
        with self._lock:
            if self._bot_send is send:
                self._bot_send = None

    @property
    def bot_linked(self) -> bool:
        with self._lock:
            return self._bot_send is not None

    def _next_seq(self) -> int:
        seq = self._seq
        self._seq = (self._seq + 1) & 0xFF
        return seq

    def _send_frames(self, frames: list[bytes]) -> bool:
        with self._lock:
            send = self._bot_send
        if send is None:
            return False
        try:
            send(b"".join(frames))
            return True
        except OSError:
            self.detach_bot_sender(send)
            return False

    def submit_mission(self, waypoints: list[dict]) -> tuple[bool, str | None]:
        """Upload a waypoint list to the bot; resolves on MISSION_ACK."""
        if not 1 <= len(waypoints) <= 65535:
            return False, "waypoint count must be 1..65535"
        items = []
        for i, wp in enumerate(waypoints):
            try:
                x, y = float(wp["x"]), float(wp["y"])
                radius = float(wp.get("radius", nav.DEFAULT_ACCEPT_RADIUS))
            except (KeyError, TypeError, ValueError):
                return False, f"waypoint {i} malformed"
            if not (math.isfinite(x) and math.isfinite(y) and radius > 0):
                return False, f"waypoint {i} not finite or radius <= 0"
            items.append(protocol.MissionItem(index=i, x=x, y=y, accept_radius=radius))

        with self._submit_lock:
            if not self.bot_linked:
                return False, "no-link"
            frames = [protocol.encode(protocol.MissionCount(count=len(items)),
                                      self._next_seq(), protocol.SYS_ID_GCS, 0)]
            frames += [protocol.encode(item, self._next_seq(), protocol.SYS_ID_GCS, 0)
                       for item in items]
            with self._lock:
                self._pending_mission_ack = None
            if not self._send_frames(frames):
                return False, "no-link"
            self.log.append("COMMAND",
                            {"type": "MISSION_UPLOAD", "count": len(items),
                             "waypoints": [{"x": i.x, "y": i.y,
                                            "radius": i.accept_radius} for i in items]},
                            self._clock())
            with self._ack_cond:
                if self._pending_mission_ack is None:
                    self._ack_cond.wait(ACK_TIMEOUT_S)
                result = self._pending_mission_ack
                self._pending_mission_ack = None
            if result is None:
                return False, "timeout"
            if result != protocol.MISSION_ACK_OK:
                return False, f"rejected:{result}"
            return True, None

    def submit_command(self, cmd_name: str) -> tuple[bool, str | None]:
        """Send one operator command; resolves on COMMAND_ACK."""
        try:
            cmd = nav.Command[cmd_name]
        except KeyError:
            return False, f"unknown command {cmd_name!r}"
        with self._submit_lock:
            if not self.bot_linked:
                return False, "no-link"
            frame = protocol.encode(protocol.CommandMsg(cmd=cmd.value),
                                    self._next_seq(), protocol.SYS_ID_GCS, 0)
            with self._lock:
                self._pending_command_ack = None
            if not self._send_frames([frame]):
                return False, "no-link"
            self.log.append("COMMAND", {"type": "COMMAND", "cmd": cmd_name},
                            self._clock())
            with self._ack_cond:
                if self._pending_command_ack is None:
                    self._ack_cond.wait(ACK_TIMEOUT_S)
                result = self._pending_command_ack
                self._pending_command_ack = None
            if result is None:
                return False, "timeout"
            if result[1] != protocol.ACK_OK:
                return False, "rejected"
            return True, None

    def system_event(self, body: dict) -> EventRecord:
        with self._lock:
            return self.log.append("SYSTEM", body, self._clock())
