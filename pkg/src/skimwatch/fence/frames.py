"""Grayscale frames and binary PGM ("P5") I/O.

Frame order for directory input is the lexicographic order of *.pgm names.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


class PgmError(ValueError):
    """Malformed portable-graymap file."""


@dataclass(frozen=True)
class Frame:
    width: int
    height: int
    pixels: bytes
    index: int = 0
    t_ms: int = 0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"pixel buffer has {len(self.pixels)} bytes, expected {self.width * self.height}"
            )


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments between header tokens.
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PgmError("truncated header")
    return data[start:pos], pos


def read_pgm(path: str | Path) -> tuple[int, int, bytes]:
    """Parse a binary 8-bit PGM; returns (width, height, pixels)."""
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise PgmError(f"{path}: not a binary PGM (magic {data[:2]!r})")
    pos = 2
    values = []
    for _ in range(3):
        token, pos = _read_token(data, pos)
        try:
            values.append(int(token))
        except ValueError:
            raise PgmError(f"{path}: non-numeric header token {token!r}") from None
    width, height, maxval = values
    if width <= 0 or height <= 0:
        raise PgmError(f"{path}: bad dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise PgmError(f"{path}: unsupported maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    pixels = data[pos:pos + width * height]
    if len(pixels) != width * height:
        raise PgmError(f"{path}: expected {width * height} pixel bytes, got {len(pixels)}")
    return width, height, pixels


def write_pgm(path: str | Path, width: int, height: int, pixels: bytes) -> None:
    if len(pixels) != width * height:
        raise ValueError("pixel buffer does not match dimensions")
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(pixels)


def iter_frame_dir(directory: str | Path, interval_ms: int = 100) -> Iterator[Frame]:
    """Yield frames from a directory of PGM files, t_ms = index * interval_ms."""
    paths = sorted(p for p in Path(directory).iterdir() if p.name.endswith(".pgm"))
    for index, path in enumerate(paths):
        width, height, pixels = read_pgm(path)
        yield Frame(width=width, height=height, pixels=pixels,
                    index=index, t_ms=index * interval_ms)
