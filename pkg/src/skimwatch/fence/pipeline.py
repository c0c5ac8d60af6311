"""Per-frame fence pipeline: detect -> track -> crossing test -> alert."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from .detect import detect_blobs
from .frames import Frame
from .geometry import FencePolyline
from .geometry import detect_crossing as _detect_crossing
from .tracking import Track, update_tracks


@dataclass(frozen=True)
class FenceParams:
    diff_threshold: int = 25      # 0..255
    min_area: int = 6             # px^2
    max_match_dist: float = 20.0  # px
    max_missed: int = 5           # frames
    cooldown: int = 10            # frames per track between counted crossings

    def __post_init__(self) -> None:
        if not 0 <= self.diff_threshold <= 255:
            raise ValueError("diff_threshold must be within 0..255")
        if self.min_area < 1:
            raise ValueError("min_area must be at least 1")
        if self.max_match_dist <= 0:
            raise ValueError("max_match_dist must be positive")
        if self.max_missed < 0 or self.cooldown < 0:
            raise ValueError("max_missed and cooldown must be non-negative")


@dataclass(frozen=True)
class Alert:
    t_ms: int
    camera_id: int
    count: int


@dataclass(frozen=True)
class FenceState:
    background: Frame
    fence: FencePolyline
    params: FenceParams = field(default_factory=FenceParams)
    camera_id: int = 1
    tracks: tuple[Track, ...] = ()
    count: int = 0
    next_track_id: int = 0


def process_frame(state: FenceState, frame: Frame) -> tuple[FenceState, list[Alert]]:
    """Run one frame through the pipeline; returns updated state and alerts.

    A matched track whose last two centroids cross the fence increments the
    count unless the track is inside its cooldown window. Suppressed
    crossings still refresh the window so centroid jitter at the fence line
    cannot re-alert by waiting out the cooldown one frame at a time.
    """
    detections = detect_blobs(frame, state.background,
                              state.params.diff_threshold, state.params.min_area)
    state = update_tracks(state, detections, frame.index)

    alerts: list[Alert] = []
    count = state.count
    tracks = list(state.tracks)
    for i, track in enumerate(tracks):
        if len(track.history) < 2 or track.history[-1][2] != frame.index:
            continue
        px, py, _ = track.history[-2]
        nx, ny, _ = track.history[-1]
        crossing = _detect_crossing((px, py), (nx, ny), state.fence)
        if crossing is None:
            continue
        in_cooldown = (track.last_crossing_frame is not None
                       and frame.index - track.last_crossing_frame <= state.params.cooldown)
        tracks[i] = replace(track, last_crossing_frame=frame.index)
        if in_cooldown:
            continue
        count += 1
        alerts.append(Alert(t_ms=frame.t_ms, camera_id=state.camera_id, count=count))

    return replace(state, tracks=tuple(tracks), count=count), alerts


def run_frames(state: FenceState, frames: Iterable[Frame]) -> tuple[FenceState, list[Alert]]:
    """Stream frames through process_frame, accumulating alerts."""
    alerts: list[Alert] = []
    for frame in frames:
        state, new = process_frame(state, frame)
        alerts.extend(new)
    return state, alerts
