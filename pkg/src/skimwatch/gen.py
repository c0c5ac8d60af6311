"""Synthetic test-asset generators: fence frame sequences and trash fields.

Everything here is deterministic for a given seed/parameters so generated
corpora are reproducible byte-for-byte.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .fence.frames import write_pgm
from .fence.geometry import DirectionMode, FencePolyline, Side, detect_crossing


def _paint_frame(width: int, height: int, x0: int, y0: int, size: int) -> bytes:
    pixels = bytearray(width * height)
    for y in range(max(y0, 0), min(y0 + size, height)):
        row = y * width
        for x in range(max(x0, 0), min(x0 + size, width)):
            pixels[row + x] = 255
    return bytes(pixels)


def _blob_positions(start: tuple[float, float], end: tuple[float, float],
                    frames: int) -> list[tuple[int, int]]:
    if frames < 2:
        raise ValueError("need at least 2 frames")
    positions = []
    for i in range(frames):
        f = i / (frames - 1)
        positions.append((round(start[0] + f * (end[0] - start[0])),
                          round(start[1] + f * (end[1] - start[1]))))
    return positions


def _zigzag_positions(x: int, y_low: int, y_high: int, crossings: int,
                      segment_frames: int) -> list[tuple[int, int]]:
    """Vertical zigzag: each segment moves fully across the fence line once."""
    positions = [(x, y_low)]
    at_low = True
    for _ in range(crossings):
        target = y_high if at_low else y_low
        origin = positions[-1][1]
        for i in range(1, segment_frames + 1):
            positions.append((x, round(origin + (target - origin) * i / segment_frames)))
        at_low = not at_low
    return positions


def gen_fence_sequence(out_dir: str | Path, width: int = 64, height: int = 64,
                       frames: int = 40, blob_size: int = 6,
                       start: tuple[float, float] = (29, 4),
                       end: tuple[float, float] = (29, 43),
                       fence_text: str = "0,32;63,32",
                       protected_side: Side = Side.LEFT,
                       direction_mode: DirectionMode = DirectionMode.INTO_PROTECTED,
                       crossings: int | None = None,
                       segment_frames: int = 14) -> dict:
    """Write a moving-blob PGM sequence plus a manifest with expected counts.

    With crossings=None the blob travels start->end in a straight line; with
    crossings=K it zigzags across the fence K times (segment spacing must sit
    beyond the pipeline cooldown for every crossing to count).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fence = FencePolyline.parse(fence_text, protected_side=protected_side,
                                direction_mode=direction_mode)
    if crossings is None:
        positions = _blob_positions(start, end, frames)
    else:
        mid = (fence.vertices[0][1] + fence.vertices[-1][1]) / 2.0
        span = max(8, 2 * blob_size)
        positions = _zigzag_positions(round(start[0]), round(mid - span),
                                      round(mid + span), crossings, segment_frames)

    half = (blob_size - 1) / 2.0
    expected = 0
    prev_centroid = None
    for x0, y0 in positions:
        centroid = (x0 + half, y0 + half)
        if prev_centroid is not None:
            if detect_crossing(prev_centroid, centroid, fence) is not None:
                expected += 1
        prev_centroid = centroid

    for i, (x0, y0) in enumerate(positions):
        write_pgm(out_dir / f"{i:04d}.pgm", width, height,
                  _paint_frame(width, height, x0, y0, blob_size))

    manifest = {
        "width": width, "height": height, "frames": len(positions),
        "blob_size": blob_size, "fence": fence_text,
        "protected_side": protected_side.name.lower(),
        "direction_mode": direction_mode.value,
        "expected_crossings": expected,
        "trajectory": [[x, y] for x, y in positions],
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n",
                                           encoding="utf-8")
    return manifest


def gen_trash_field(n: int, seed: int = 0, x_range: tuple[float, float] = (0.0, 60.0),
                    y_range: tuple[float, float] = (0.0, 30.0),
                    mass_range: tuple[float, float] = (0.1, 0.4)) -> list[dict]:
    rng = random.Random(seed)
    return [{"id": i,
             "x": round(rng.uniform(*x_range), 3),
             "y": round(rng.uniform(*y_range), 3),
             "mass": round(rng.uniform(*mass_range), 3)}
            for i in range(n)]


def gen_trash_near_path(n: int, path: list[tuple[float, float]], seed: int = 0,
                        max_offset: float = 1.8,
                        mass_range: tuple[float, float] = (0.1, 0.4)) -> list[dict]:
    """Scatter items within max_offset meters laterally of a waypoint path."""
    rng = random.Random(seed)
    segments = list(zip(path, path[1:]))
    lengths = [((bx - ax) ** 2 + (by - ay) ** 2) ** 0.5
               for (ax, ay), (bx, by) in segments]
    total = sum(lengths)
    items = []
    for i in range(n):
        d = rng.uniform(0.02, 0.98) * total
        for ((ax, ay), (bx, by)), seg_len in zip(segments, lengths):
            if d <= seg_len:
                f = d / seg_len
                px, py = ax + f * (bx - ax), ay + f * (by - ay)
                # unit normal to the segment
                nx, ny = -(by - ay) / seg_len, (bx - ax) / seg_len
                off = rng.uniform(-max_offset, max_offset)
                items.append({"id": i, "x": round(px + off * nx, 3),
                              "y": round(py + off * ny, 3),
                              "mass": round(rng.uniform(*mass_range), 3)})
                break
            d -= seg_len
    return items
