"""Binary telemetry/command link between bot, fence cameras, and the GCS.

Wire framing (little-endian throughout):

    offset  size  field
    0       1     magic 0xC7
    1       1     payload_len (fixed per message id)
    2       1     seq (wrapping)
    3       1     sys_id (1 bot, 200 fence camera, 255 GCS)
    4       1     comp_id
    5       1     msg_id
    6       n     payload
    6+n     2     CRC-16/CCITT-FALSE over bytes 1..6+n (magic excluded)

Float fields ride as IEEE-754 binary32; message dataclasses snap their float
fields to that precision on construction so decode(encode(m)) == m holds
exactly. The full layout table lives in PROTOCOL.md.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields

from . import kernels

MAGIC = 0xC7
HEADER_LEN = 6
CRC_LEN = 2
MAX_FRAME_LEN = 8 + 255

SYS_ID_BOT = 1
SYS_ID_FENCE = 200
SYS_ID_GCS = 255

# MISSION_ACK results
MISSION_ACK_OK = 0
MISSION_ACK_TIMEOUT = 1
MISSION_ACK_REJECTED = 2

# COMMAND_ACK / generic ack results
ACK_OK = 0
ACK_REJECTED = 1

_F32 = struct.Struct("<f")


def _f32(value: float) -> float:
    return _F32.unpack(_F32.pack(value))[0]


class _MessageBase:
    MSG_ID: int
    _STRUCT: struct.Struct
    _FLOAT_FIELDS: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in self._FLOAT_FIELDS:
            object.__setattr__(self, name, _f32(getattr(self, name)))

    def pack(self) -> bytes:
        return self._STRUCT.pack(*(getattr(self, f.name) for f in fields(self)))

    @classmethod
    def unpack(cls, payload: bytes):
        return cls(*cls._STRUCT.unpack(payload))


@dataclass(frozen=True)
class Heartbeat(_MessageBase):
    mode: int
    armed: int
    MSG_ID = 0
    _STRUCT = struct.Struct("<BB")


@dataclass(frozen=True)
class Position(_MessageBase):
    t_ms: int
    x: float
    y: float
    heading: float
    speed: float
    MSG_ID = 1
    _STRUCT = struct.Struct("<I4f")
    _FLOAT_FIELDS = ("x", "y", "heading", "speed")


@dataclass(frozen=True)
class Power(_MessageBase):
    soc_wh: float
    solar_w: float
    load_w: float
    MSG_ID = 2
    _STRUCT = struct.Struct("<3f")
    _FLOAT_FIELDS = ("soc_wh", "solar_w", "load_w")


@dataclass(frozen=True)
class TrashStatus(_MessageBase):
    payload_kg: float
    items: int
    MSG_ID = 3
    _STRUCT = struct.Struct("<fH")
    _FLOAT_FIELDS = ("payload_kg",)


@dataclass(frozen=True)
class MissionCount(_MessageBase):
    count: int
    MSG_ID = 4
    _STRUCT = struct.Struct("<H")


@dataclass(frozen=True)
class MissionItem(_MessageBase):
    index: int
    x: float
    y: float
    accept_radius: float
    MSG_ID = 5
    _STRUCT = struct.Struct("<H3f")
    _FLOAT_FIELDS = ("x", "y", "accept_radius")


@dataclass(frozen=True)
class MissionAck(_MessageBase):
    result: int
    MSG_ID = 6
    _STRUCT = struct.Struct("<B")


@dataclass(frozen=True)
class CommandMsg(_MessageBase):
    cmd: int
    MSG_ID = 7
    _STRUCT = struct.Struct("<B")


@dataclass(frozen=True)
class CommandAck(_MessageBase):
    cmd: int
    result: int
    MSG_ID = 8
    _STRUCT = struct.Struct("<BB")


@dataclass(frozen=True)
class FenceAlert(_MessageBase):
    t_ms: int
    camera_id: int
    count: int
    MSG_ID = 9
    _STRUCT = struct.Struct("<IBH")


MESSAGE_TYPES: dict[int, type[_MessageBase]] = {
    cls.MSG_ID: cls
    for cls in (Heartbeat, Position, Power, TrashStatus, MissionCount,
                MissionItem, MissionAck, CommandMsg, CommandAck, FenceAlert)
}

Message = (Heartbeat | Position | Power | TrashStatus | MissionCount
           | MissionItem | MissionAck | CommandMsg | CommandAck | FenceAlert)


@dataclass(frozen=True)
class Decoded:
    msg: Message
    seq: int
    sys_id: int
    comp_id: int


@dataclass(frozen=True)
class DecodeIssue:
    kind: str  # "bad_crc" | "unknown_msg_id" | "bad_length" | "resync"
    at: int    # byte offset within the scanned buffer
    msg_id: int | None = None


def encode(msg: Message, seq: int, sys_id: int, comp_id: int) -> bytes:
    """Serialize one message into a checksummed frame."""
    payload = msg.pack()
    header = bytes((len(payload), seq & 0xFF, sys_id & 0xFF, comp_id & 0xFF, msg.MSG_ID))
    crc = kernels.crc16(header + payload)
    return bytes((MAGIC,)) + header + payload + struct.pack("<H", crc)


def decode_stream(buffer: bytes) -> tuple[list[Decoded], bytes, list[DecodeIssue]]:
    """Scan a byte buffer for frames.

    Complete frames with a good CRC and known id are yielded in order. A bad
    CRC, unknown id, or id/length mismatch records an issue and restarts the
    scan at the next magic byte. A trailing incomplete candidate frame is
    returned as the remainder so decoding can continue when more bytes
    arrive; decisions are only made on complete candidates, which keeps
    chunked feeding equivalent to one-shot decoding.
    """
    messages: list[Decoded] = []
    issues: list[DecodeIssue] = []
    pos = 0
    n = len(buffer)
    while True:
        start = buffer.find(MAGIC, pos)
        if start < 0:
            if pos < n:  # trailing non-frame bytes dropped
                issues.append(DecodeIssue("resync", at=pos))
            return messages, b"", issues
        if start > pos:
            issues.append(DecodeIssue("resync", at=pos))
        if n - start < HEADER_LEN + CRC_LEN:
            return messages, buffer[start:], issues
        payload_len = buffer[start + 1]
        total = HEADER_LEN + payload_len + CRC_LEN
        if n - start < total:
            return messages, buffer[start:], issues

        body = buffer[start + 1:start + HEADER_LEN + payload_len]
        (crc,) = struct.unpack_from("<H", buffer, start + HEADER_LEN + payload_len)
        msg_id = buffer[start + 5]
        if kernels.crc16(body) != crc:
            issues.append(DecodeIssue("bad_crc", at=start))
            pos = start + 1
            continue
        cls = MESSAGE_TYPES.get(msg_id)
        if cls is None:
            issues.append(DecodeIssue("unknown_msg_id", at=start, msg_id=msg_id))
            pos = start + 1
            continue
        if payload_len != cls._STRUCT.size:
            issues.append(DecodeIssue("bad_length", at=start, msg_id=msg_id))
            pos = start + 1
            continue
        payload = buffer[start + HEADER_LEN:start + HEADER_LEN + payload_len]
        messages.append(Decoded(msg=cls.unpack(payload), seq=buffer[start + 2],
                                sys_id=buffer[start + 3], comp_id=buffer[start + 4]))
        pos = start + total


class StreamDecoder:
    """Stateful wrapper around decode_stream for live byte streams."""

    def __init__(self) -> None:
        self._buffer = b""
        self.issues: list[DecodeIssue] = []

    def feed(self, data: bytes) -> list[Decoded]:
        messages, self._buffer, issues = decode_stream(self._buffer + data)
        self.issues.extend(issues)
        return messages

    @property
    def pending(self) -> int:
        return len(self._buffer)
