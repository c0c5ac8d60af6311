"""Fence geometry: orientation predicate and crossing detection.

Sides are named from the fence's traversal direction: for a segment a->b,
LEFT is the positive cross-product side of (b-a) x (p-a). A movement counts
as a crossing only when its endpoints lie strictly on opposite sides of the
fence segment's line and the movement straddles the segment itself; touch
cases at a fence vertex count (one orientation zero), collinear travel on
the fence never does.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

Point = tuple[float, float]


class Side(enum.IntEnum):
    RIGHT = -1
    LEFT = 1


class DirectionMode(enum.Enum):
    INTO_PROTECTED = "into_protected"
    ANY = "any"


def side_of(point: Point, a: Point, b: Point) -> int:
    """Sign of the cross product (b-a) x (p-a): +1 left, -1 right, 0 collinear."""
    if a == b:
        raise ValueError("segment endpoints must be distinct")
    cross = (b[0] - a[0]) * (point[1] - a[1]) - (b[1] - a[1]) * (point[0] - a[0])
    if cross > 0:
        return 1
    if cross < 0:
        return -1
    return 0


@dataclass(frozen=True)
class FencePolyline:
    vertices: tuple[Point, ...]
    protected_side: Side = Side.RIGHT
    direction_mode: DirectionMode = DirectionMode.INTO_PROTECTED

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ValueError("fence needs at least two vertices")
        for v in self.vertices:
            if not (math.isfinite(v[0]) and math.isfinite(v[1])):
                raise ValueError("fence vertices must be finite")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a == b:
                raise ValueError("consecutive fence vertices must be distinct")

    @property
    def segments(self) -> list[tuple[Point, Point]]:
        return list(zip(self.vertices, self.vertices[1:]))

    @classmethod
    def parse(cls, text: str, protected_side: Side = Side.RIGHT,
              direction_mode: DirectionMode = DirectionMode.INTO_PROTECTED) -> "FencePolyline":
        """Parse "x1,y1;x2,y2;..." into a polyline."""
        vertices = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ValueError(f"bad fence vertex {chunk!r}")
            vertices.append((float(parts[0]), float(parts[1])))
        return cls(vertices=tuple(vertices), protected_side=protected_side,
                   direction_mode=direction_mode)


@dataclass(frozen=True)
class Crossing:
    segment_index: int
    direction: Side  # side of the fence the mover ended up on


def detect_crossing(prev: Point, new: Point, fence: FencePolyline) -> Crossing | None:
    """Test whether the movement prev->new crosses the fence.

    The first fence segment (by index) the movement intersects is the
    candidate; in INTO_PROTECTED mode the crossing is reported only when the
    new side is the protected side.
    """
    for v in (*prev, *new):
        if not math.isfinite(v):
            raise ValueError("centroids must be finite")
    if prev == new:
        return None
    for index, (a, b) in enumerate(fence.segments):
        s_prev = side_of(prev, a, b)
        s_new = side_of(new, a, b)
        if s_prev * s_new >= 0:  # same side, on-line start/end, or collinear travel
            continue
        o_a = side_of(a, prev, new)
        o_b = side_of(b, prev, new)
        if o_a * o_b > 0:  # movement's line misses this fence segment
            continue
        direction = Side.LEFT if s_new > 0 else Side.RIGHT
        if fence.direction_mode is DirectionMode.INTO_PROTECTED and direction is not fence.protected_side:
            return None
        return Crossing(segment_index=index, direction=direction)
    return None
