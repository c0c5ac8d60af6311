"""Centroid tracking with greedy globally-nearest assignment."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .detect import Blob


@dataclass(frozen=True)
class Track:
    id: int
    history: tuple[tuple[float, float, int], ...]  # (cx, cy, frame_index)
    missed: int = 0
    last_crossing_frame: int | None = None

    def __post_init__(self) -> None:
        if not self.history:
            raise ValueError("track history must be non-empty")
        indices = [h[2] for h in self.history]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("track frame indices must be strictly increasing")

    @property
    def centroid(self) -> tuple[float, float]:
        cx, cy, _ = self.history[-1]
        return cx, cy


def update_tracks(state, detections: list[Blob], frame_index: int):
    """Match detections to tracks, spawn and expire as needed.

    Pairs are matched greedily by globally smallest distance <= max_match_dist
    (ties by track id, then detection order). Unmatched detections spawn
    tracks with fresh ids; unmatched tracks age and are dropped once missed
    exceeds max_missed. Returns the state with updated tracks.
    """
    params = state.params
    tracks = list(state.tracks)

    pairs = []
    for ti, track in enumerate(tracks):
        tx, ty = track.centroid
        for di, det in enumerate(detections):
            dist = math.hypot(det.cx - tx, det.cy - ty)
            if dist <= params.max_match_dist:
                pairs.append((dist, track.id, di, ti))
    pairs.sort()

    matched_tracks: dict[int, int] = {}  # track list index -> detection index
    used_detections: set[int] = set()
    for dist, _, di, ti in pairs:
        if ti in matched_tracks or di in used_detections:
            continue
        matched_tracks[ti] = di
        used_detections.add(di)

    next_id = state.next_track_id
    updated: list[Track] = []
    for ti, track in enumerate(tracks):
        if ti in matched_tracks:
            det = detections[matched_tracks[ti]]
            updated.append(replace(track, history=track.history + ((det.cx, det.cy, frame_index),),
                                   missed=0))
        elif track.missed + 1 > params.max_missed:
            continue
        else:
            updated.append(replace(track, missed=track.missed + 1))
    for di, det in enumerate(detections):
        if di not in used_detections:
            updated.append(Track(id=next_id, history=((det.cx, det.cy, frame_index),)))
            next_id += 1

    return replace(state, tracks=tuple(updated), next_track_id=next_id)
