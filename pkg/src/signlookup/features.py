"""Pose-feature sequences and their on-disk document format.

A sequence is a (frames, keypoints, 3) float array; the trailing axis holds
x, y, and a confidence in [0, 1]. The file format is a UTF-8 JSON document:

    {
      "kpcount": 10,
      "fps": 30.0,            // optional; omitted when unknown
      "frames": [ [[x, y, conf], ... kpcount triples], ... ]
    }

`dumps_features(loads_features(text))` is canonical: parsing and re-dumping a
canonical document reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput, ParseError


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """Per-frame pose keypoints for one clip."""

    data: np.ndarray  # float64, shape (T, K, 3): x, y, conf
    fps: float | None = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InvalidInput(f"feature array must have shape (T, K, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInput("feature sequence needs at least one frame and one keypoint")
        conf = arr[:, :, 2]
        if np.any(conf < 0.0) or np.any(conf > 1.0):
            raise InvalidInput("keypoint confidences must lie in [0, 1]")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("feature values must be finite")
        if self.fps is not None and not self.fps > 0:
            raise InvalidInput("fps must be positive when present")
        object.__setattr__(self, "data", arr)

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def kpcount(self) -> int:
        return self.data.shape[1]

    def frame(self, i: int) -> np.ndarray:
        """The i-th frame as a (K, 3) array."""
        return self.data[i]

    def segment(self, start: int, end: int) -> "FeatureSequence":
        """Frames [start, end) as a new sequence; bounds validated by the caller."""
        return FeatureSequence(self.data[start:end].copy(), fps=self.fps)

    def duration_s(self, default_fps: float = 30.0) -> float:
        """Clip duration, assuming `default_fps` when the file carried no rate."""
        rate = self.fps if self.fps is not None else default_fps
        return len(self) / rate


def loads_features(text: str) -> FeatureSequence:
    """Parse a feature-sequence document; raises ParseError on any malformation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"feature file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("feature file must be a JSON object")
    try:
        kpcount = doc["kpcount"]
        frames = doc["frames"]
    except KeyError as exc:
        raise ParseError(f"feature file is missing field {exc.args[0]!r}") from exc
    if not isinstance(kpcount, int) or kpcount < 1:
        raise ParseError("kpcount must be a positive integer")
    if not isinstance(frames, list) or not frames:
        raise ParseError("frames must be a nonempty list")
    fps = doc.get("fps")
    if fps is not None and (not isinstance(fps, (int, float)) or not fps > 0):
        raise ParseError("fps must be a positive number when present")
    arr = np.empty((len(frames), kpcount, 3), dtype=np.float64)
    for t, frame in enumerate(frames):
        if not isinstance(frame, list) or len(frame) != kpcount:
            raise ParseError(f"frame {t} does not have {kpcount} keypoints")
        for k, kp in enumerate(frame):
            if not isinstance(kp, list) or len(kp) != 3:
                raise ParseError(f"frame {t} keypoint {k} is not an [x, y, conf] triple")
            if not all(isinstance(v, (int, float)) for v in kp):
                raise ParseError(f"frame {t} keypoint {k} has a non-numeric value")
            arr[t, k] = kp
    try:
        return FeatureSequence(arr, fps=float(fps) if fps is not None else None)
    except InvalidInput as exc:
        raise ParseError(str(exc)) from exc


def dumps_features(seq: FeatureSequence) -> str:
    """Serialize to the canonical document form (stable key order, no whitespace drift)."""
    doc: dict = {"kpcount": seq.kpcount}
    if seq.fps is not None:
        doc["fps"] = seq.fps
    doc["frames"] = [[[float(v) for v in kp] for kp in frame] for frame in seq.data]
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def load_feature_file(path: str | Path) -> FeatureSequence:
    return loads_features(Path(path).read_text(encoding="utf-8"))


def save_feature_file(seq: FeatureSequence, path: str | Path) -> None:
    Path(path).write_text(dumps_features(seq), encoding="utf-8")
