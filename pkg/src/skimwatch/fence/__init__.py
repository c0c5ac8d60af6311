"""Shore-surveillance engine: blob detection, centroid tracking, fence counting."""

from .detect import Blob, detect_blobs
from .frames import Frame, PgmError, iter_frame_dir, read_pgm, write_pgm
from .geometry import Crossing, DirectionMode, FencePolyline, Side, detect_crossing, side_of
from .pipeline import Alert, FenceParams, FenceState, process_frame, run_frames
from .tracking import Track, update_tracks

__all__ = [
    "Alert", "Blob", "Crossing", "DirectionMode", "FenceParams", "FencePolyline",
    "FenceState", "Frame", "PgmError", "Side", "Track", "detect_blobs",
    "detect_crossing", "iter_frame_dir", "process_frame", "read_pgm",
    "run_frames", "side_of", "update_tracks", "write_pgm",
]
