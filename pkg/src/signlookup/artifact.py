"""Versioned bank+gallery artifacts produced by `ingest`.

An artifact is one self-contained JSON document: the bank manifest with
exemplar features inlined, plus the normalization parameters the gallery was
indexed with. Loaders refuse artifacts whose schema version does not match.
Writes are atomic (temp file + rename), so a failed ingest never leaves a
truncated artifact behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import ArtifactError
from .matcher import DEFAULT_BAND_FRACTION, GalleryIndex, build_index
from .signbank import Bank, export_manifest, import_bank

ARTIFACT_SCHEMA = "sign-lookup-artifact/1"


@dataclass(frozen=True)
class ArtifactParams:
    ref_keypoint: int = 0
    band_fraction: float = DEFAULT_BAND_FRACTION


def save_artifact(path: str | Path, bank: Bank, params: ArtifactParams) -> None:
    path = Path(path)
    doc = {
        "schema": ARTIFACT_SCHEMA,
        "normalization": {
            "ref_keypoint": params.ref_keypoint,
            "band_fraction": params.band_fraction,
        },
        "handshapes": sorted(bank.handshapes),
        "bank": export_manifest(bank, inline_features=True),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".artifact-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load_artifact(path: str | Path) -> tuple[Bank, ArtifactParams]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"cannot read artifact {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != ARTIFACT_SCHEMA:
        raise ArtifactError(
            f"artifact {path} has schema {doc.get('schema')!r}, expected {ARTIFACT_SCHEMA!r}"
        )
    norm = doc.get("normalization", {})
    params = ArtifactParams(
        ref_keypoint=int(norm.get("ref_keypoint", 0)),
        band_fraction=float(norm.get("band_fraction", DEFAULT_BAND_FRACTION)),
    )
    bank = import_bank(doc["bank"], handshape_inventory=doc.get("handshapes"))
    return bank, params


def load_index(path: str | Path) -> tuple[Bank, GalleryIndex]:
    bank, params = load_artifact(path)
    index = build_index(bank, ref_keypoint=params.ref_keypoint, band_fraction=params.band_fraction)
    return bank, index
