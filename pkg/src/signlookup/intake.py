"""Upload intake: validation against the published constraints, feature
extraction behind a plug-in boundary, and guaranteed deletion of upload bytes.

Uploads are never written anywhere except the designated spool directory, and
`Spool.purge` removes an upload's bytes before any response leaves the
service — on failure paths too. Raw-video pose extraction is out of scope;
the shipped pipeline accepts pre-extracted `.features` documents and rejects
video unless an extractor plug-in is configured.
"""

from __future__ import annotations

import logging
import re
import struct
import uuid
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol

from .errors import ExtractorUnavailable, ParseError, PurgeError
from .features import FeatureSequence, loads_features
from .matcher import QueryMode

log = logging.getLogger(__name__)

FILENAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
MAX_DURATION_S = 7.0
DEFAULT_FPS = 30.0
DEFAULT_MAX_PAYLOAD_BYTES = 64 * 1024 * 1024


class UploadKind(str, Enum):
    VIDEO_MP4 = "video_mp4"
    VIDEO_MOV = "video_mov"
    FEATURES = "features"


_KIND_EXTENSIONS = {
    UploadKind.VIDEO_MP4: ".mp4",
    UploadKind.VIDEO_MOV: ".mov",
    UploadKind.FEATURES: ".features",
}


@dataclass
class UploadDescriptor:
    filename: str
    payload: bytes
    declared_kind: UploadKind | None  # None: extension did not identify a kind
    sign_type: QueryMode
    duration_s: float = 0.0
    spool_path: Path | None = None


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def accepted(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "violations": [{"rule": v.rule, "message": v.message} for v in self.violations],
        }


class ExtractorContract(Protocol):
    """Pose-extraction plug-in boundary; implementations must not retain payload bytes."""

    def extract(self, payload: bytes, kind: UploadKind) -> FeatureSequence: ...


def kind_for_filename(filename: str) -> UploadKind | None:
    suffix = Path(filename).suffix.lower()
    for kind, ext in _KIND_EXTENSIONS.items():
        if suffix == ext:
            return kind
    return None


def probe_container_duration(payload: bytes) -> float | None:
    """Duration in seconds from an ISO-BMFF/QuickTime `moov/mvhd` box, if readable.

    Pure container-metadata parsing; no decoding. Returns None whenever the
    box structure is absent or inconsistent.
    """

    def walk(buf: bytes, want: bytes) -> bytes | None:
        off = 0
        while off + 8 <= len(buf):
            size = struct.unpack(">I", buf[off : off + 4])[0]
            box_type = buf[off + 4 : off + 8]
            header = 8
            if size == 1:
                if off + 16 > len(buf):
                    return None
                size = struct.unpack(">Q", buf[off + 8 : off + 16])[0]
                header = 16
            elif size == 0:
                size = len(buf) - off
            if size < header or off + size > len(buf):
                return None
            if box_type == want:
                return buf[off + header : off + size]
            off += size
        return None

    try:
        moov = walk(payload, b"moov")
        if moov is None:
            return None
        mvhd = walk(moov, b"mvhd")
        if mvhd is None or len(mvhd) < 20:
            return None
        version = mvhd[0]
        if version == 0:
            timescale, duration = struct.unpack(">II", mvhd[12:20])
        elif version == 1 and len(mvhd) >= 32:
            timescale = struct.unpack(">I", mvhd[20:24])[0]
            duration = struct.unpack(">Q", mvhd[24:32])[0]
        else:
            return None
        if timescale == 0:
            return None
        return duration / timescale
    except struct.error:
        return None


def build_descriptor(
    filename: str,
    payload: bytes,
    sign_type: QueryMode,
    default_fps: float = DEFAULT_FPS,
) -> UploadDescriptor:
    """Assemble the descriptor, deriving duration from the payload itself.

    Feature uploads use frame count over fps (assumed `default_fps` when the
    file names none); video uploads use container metadata when present.
    """
    kind = kind_for_filename(filename)
    duration = 0.0
    if kind is UploadKind.FEATURES:
        try:
            seq = loads_features(payload.decode("utf-8"))
            duration = seq.duration_s(default_fps)
        except (ParseError, UnicodeDecodeError):
            duration = 0.0  # unparseable content surfaces later as ParseError
    elif kind is not None:
        duration = probe_container_duration(payload) or 0.0
    return UploadDescriptor(
        filename=filename,
        payload=payload,
        declared_kind=kind,
        sign_type=sign_type,
        duration_s=duration,
    )


def validate(
    desc: UploadDescriptor,
    max_payload_bytes: int = DEFAULT_MAX_PAYLOAD_BYTES,
) -> ValidationReport:
    """Check the upload against every intake rule; the report lists all violations."""
    violations: list[Violation] = []
    if not FILENAME_RE.match(desc.filename or ""):
        violations.append(
            Violation(
                "filename",
                "filename must start with a letter or digit and contain only "
                "letters, numbers, and the symbols - _ .",
            )
        )
    if desc.declared_kind is None:
        violations.append(
            Violation("extension", "acceptable upload types are .mp4, .mov, and .features")
        )
    else:
        expected = _KIND_EXTENSIONS[desc.declared_kind]
        if Path(desc.filename).suffix.lower() != expected:
            violations.append(
                Violation("extension", f"filename extension does not match {expected}")
            )
    if desc.duration_s > MAX_DURATION_S:
        violations.append(
            Violation(
                "duration",
                f"clip duration {desc.duration_s:.2f}s exceeds the {MAX_DURATION_S:.0f}s limit",
            )
        )
    if not desc.payload:
        violations.append(Violation("payload", "upload payload is empty"))
    elif len(desc.payload) > max_payload_bytes:
        violations.append(
            Violation("size", f"payload exceeds the {max_payload_bytes} byte cap")
        )
    return ValidationReport(tuple(violations))


def extract_features(
    desc: UploadDescriptor, extractor: ExtractorContract | None = None
) -> FeatureSequence:
    """Get the feature sequence for an accepted upload.

    `.features` payloads are parsed directly; video payloads require the
    extractor plug-in (none ships with the repository).
    """
    if desc.declared_kind is UploadKind.FEATURES:
        try:
            text = desc.payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"feature upload is not UTF-8: {exc}") from exc
        return loads_features(text)
    if extractor is None:
        raise ExtractorUnavailable(
            "no pose-extraction plug-in is configured; upload pre-extracted .features"
        )
    return extractor.extract(desc.payload, desc.declared_kind)


class Spool:
    """Holds upload bytes on disk for the lifetime of one request.

    Entries are uniquely named so concurrent uploads never collide, and a
    purge touches only its own entry. Failed deletions raise `PurgeError`
    and park the path on a retry queue rather than blocking the response.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.retry_queue: list[Path] = []

    def store(self, desc: UploadDescriptor) -> Path:
        suffix = Path(desc.filename).suffix if FILENAME_RE.match(desc.filename or "") else ""
        path = self.root / f"{uuid.uuid4().hex}{suffix}"
        path.write_bytes(desc.payload)
        desc.spool_path = path
        return path

    def purge(self, desc: UploadDescriptor) -> None:
        path = desc.spool_path
        if path is None:
            return
        try:
            path.unlink(missing_ok=True)
        except OSError as exc:
            self.retry_queue.append(path)
            raise PurgeError(f"could not delete spooled upload {path}: {exc}") from exc
        desc.spool_path = None

    def retry_pending(self) -> None:
        remaining = []
        for path in self.retry_queue:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                remaining.append(path)
        self.retry_queue = remaining

    def resident_bytes(self) -> int:
        """Total bytes currently spooled; 0 means no upload data is retained."""
        return sum(p.stat().st_size for p in self.root.iterdir() if p.is_file())
