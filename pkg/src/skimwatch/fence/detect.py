"""Moving-body detection by background differencing + connected components."""

from __future__ import annotations

from typing import NamedTuple

from .. import kernels
from .frames import Frame


class Blob(NamedTuple):
    cx: float
    cy: float
    area: int


def detect_blobs(frame: Frame, background: Frame, diff_threshold: int,
                 min_area: int) -> list[Blob]:
    """Blobs where |frame - background| >= diff_threshold.

    8-connected components with area >= min_area, as (float centroid, area),
    sorted by area descending then by (cy, cx).
    """
    if (frame.width, frame.height) != (background.width, background.height):
        raise ValueError(
            f"frame {frame.width}x{frame.height} does not match "
            f"background {background.width}x{background.height}"
        )
    if not 0 <= diff_threshold <= 255:
        raise ValueError("diff_threshold must be within 0..255")
    raw = kernels.diff_blobs(frame.pixels, background.pixels,
                             frame.width, frame.height, diff_threshold, min_area)
    blobs = [Blob(cx, cy, area) for cx, cy, area in raw]
    blobs.sort(key=lambda b: (-b.area, b.cy, b.cx))
    return blobs
