"""Banded DTW matching of pose sequences against a sign gallery.

The matcher canonicalizes sequences for translation and scale, computes a
confidence-weighted frame distance, aligns sequences with dynamic time warping
under a Sakoe-Chiba band, aggregates exemplar distances to variant and entry
scores, and returns the k closest signs in ascending distance. "Most likely"
in the UI is "smallest distance" here; no probability calibration is applied.

A trained recognizer can replace the whole pipeline behind the `Recognizer`
contract; `DtwRecognizer` is the reference implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

import numpy as np

from .errors import EmptyGallery, InvalidInput, NotFound
from .features import FeatureSequence
from .signbank import Bank

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

DEFAULT_BAND_FRACTION = 0.2
DEFAULT_K = 5


class QueryMode(str, Enum):
    """How the query clip was produced; segmented clips get length-normalized scores."""

    CITATION = "citation"
    SEGMENTED = "segmented"


@dataclass(frozen=True)
class DtwResult:
    distance: float
    path_len: int


@dataclass(frozen=True)
class VariantScore:
    variant_id: str
    label: str
    score: float


@dataclass(frozen=True)
class Candidate:
    entry_id: str
    base_gloss: str
    score: float
    variants: tuple[VariantScore, ...]


@dataclass(frozen=True)
class CandidateList:
    """Top-k candidates, ascending by score; each candidate carries all its variants."""

    candidates: tuple[Candidate, ...]
    mode: QueryMode

    def glosses(self) -> list[str]:
        return [c.base_gloss for c in self.candidates]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "candidates": [
                {
                    "rank": i + 1,
                    "entry_id": c.entry_id,
                    "base_gloss": c.base_gloss,
                    "score": c.score,
                    "variants": [
                        {"variant_id": v.variant_id, "label": v.label, "score": v.score}
                        for v in c.variants
                    ],
                }
                for i, c in enumerate(self.candidates)
            ],
        }


class Recognizer(Protocol):
    """Contract for any recognition backend plugged into the lookup flow."""

    def recognize(self, query: FeatureSequence, mode: QueryMode) -> CandidateList: ...


def normalize(seq: FeatureSequence, ref_keypoint: int = 0) -> FeatureSequence:
    """Translation/scale-canonical copy of `seq`.

    Each frame is translated so the reference keypoint sits at the origin, then
    all coordinates are divided by the sequence-wide RMS coordinate magnitude
    over keypoints with positive confidence. Confidences pass through. A zero
    RMS (e.g. all-zero coordinates) falls back to scale 1. Idempotent.
    """
    if seq is None or len(seq) == 0:
        raise InvalidInput("cannot normalize an empty sequence")
    if not 0 <= ref_keypoint < seq.kpcount:
        raise InvalidInput(f"reference keypoint {ref_keypoint} out of range for K={seq.kpcount}")
    data = seq.data
    xy = data[:, :, :2] - data[:, ref_keypoint : ref_keypoint + 1, :2]
    conf = data[:, :, 2]
    mask = conf > 0.0
    if mask.any():
        rms = math.sqrt(float(np.sum(xy[mask] ** 2)) / int(mask.sum()))
    else:
        rms = 0.0
    scale = rms if rms > 0.0 else 1.0
    out = np.empty_like(data)
    out[:, :, :2] = xy / scale
    out[:, :, 2] = conf
    return FeatureSequence(out, fps=seq.fps)


def frame_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Confidence-weighted Euclidean distance between two (K, 3) frames.

    Weights are the per-keypoint minimum of the two confidences; with zero
    total weight the frames are deemed indistinguishable (distance 0).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != 3:
        raise InvalidInput(f"frames must share shape (K, 3); got {a.shape} vs {b.shape}")
    w = np.minimum(a[:, 2], b[:, 2])
    total = float(w.sum())
    if total == 0.0:
        return 0.0
    d2 = (a[:, 0] - b[:, 0]) ** 2 + (a[:, 1] - b[:, 1]) ** 2
    return math.sqrt(float((w * d2).sum()) / total)


def _dtw_impl(a: np.ndarray, b: np.ndarray, band: int):
    """DP alignment of (m,K,3) vs (n,K,3); band < 0 disables the band.

    Returns (distance, path_len) where path_len counts the cells on one
    optimal warping path, reconstructed with deterministic tie-breaking:
    diagonal first, then the predecessor with smaller accumulated cost,
    vertical before horizontal on exact ties.
    """
    m = a.shape[0]
    n = b.shape[0]
    kp = a.shape[1]
    inf = np.inf
    cost = np.full((m, n), inf)
    for i in range(m):
        jlo = 0
        jhi = n
        if band >= 0:
            if i - band > 0:
                jlo = i - band
            if i + band + 1 < n:
                jhi = i + band + 1
        for j in range(jlo, jhi):
            num = 0.0
            den = 0.0
            for k in range(kp):
                w = min(a[i, k, 2], b[j, k, 2])
                if w > 0.0:
                    dx = a[i, k, 0] - b[j, k, 0]
                    dy = a[i, k, 1] - b[j, k, 1]
                    num += w * (dx * dx + dy * dy)
                    den += w
            cost[i, j] = 0.0 if den == 0.0 else math.sqrt(num / den)

    acc = np.full((m, n), inf)
    for i in range(m):
        jlo = 0
        jhi = n
        if band >= 0:
            if i - band > 0:
                jlo = i - band
            if i + band + 1 < n:
                jhi = i + band + 1
        for j in range(jlo, jhi):
            if i == 0 and j == 0:
                acc[0, 0] = cost[0, 0]
                continue
            best = inf
            if i > 0 and j > 0 and acc[i - 1, j - 1] < best:
                best = acc[i - 1, j - 1]
            if i > 0 and acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if j > 0 and acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = cost[i, j] + best

    # Traceback for path length only; candidate order encodes the tie-break.
    i = m - 1
    j = n - 1
    path_len = 1
    while i > 0 or j > 0:
        bi = -1
        bj = -1
        bc = inf
        if i > 0 and j > 0:
            bi = i - 1
            bj = j - 1
            bc = acc[i - 1, j - 1]
        if i > 0 and (bi < 0 or acc[i - 1, j] < bc):
            bi = i - 1
            bj = j
            bc = acc[i - 1, j]
        if j > 0 and (bi < 0 or acc[i, j - 1] < bc):
            bi = i
            bj = j - 1
            bc = acc[i, j - 1]
        i = bi
        j = bj
        path_len += 1
    return acc[m - 1, n - 1], path_len


if _HAVE_NUMBA:
    _dtw_fast = njit(cache=True, nogil=True)(_dtw_impl)
else:  # pragma: no cover
    _dtw_fast = _dtw_impl


def dtw(a: FeatureSequence, b: FeatureSequence, band: int | None = None) -> DtwResult:
    """Minimum-cost monotone alignment of two sequences.

    `band` constrains |i - j| (Sakoe-Chiba); it must be at least the length
    difference, and None disables the constraint entirely.
    """
    if len(a) == 0 or len(b) == 0:
        raise InvalidInput("dtw requires nonempty sequences")
    if a.kpcount != b.kpcount:
        raise InvalidInput(f"keypoint counts differ: {a.kpcount} vs {b.kpcount}")
    m, n = len(a), len(b)
    if band is not None:
        if band <= 0:
            raise InvalidInput("band must be a positive integer")
        if band < abs(m - n):
            raise InvalidInput(f"band {band} cannot bridge the length difference {abs(m - n)}")
    arr_a = np.ascontiguousarray(a.data)
    arr_b = np.ascontiguousarray(b.data)
    distance, path_len = _dtw_fast(arr_a, arr_b, -1 if band is None else int(band))
    return DtwResult(float(distance), int(path_len))


def default_band(m: int, n: int, fraction: float = DEFAULT_BAND_FRACTION) -> int:
    """Band wide enough to always be feasible: max(|m-n|, ceil(fraction*max(m,n)))."""
    return max(abs(m - n), math.ceil(fraction * max(m, n)), 1)


@dataclass(frozen=True, eq=False)
class GalleryIndex:
    """Normalized exemplar gallery plus the variant/entry structure of the bank.

    Immutable after build; `rank` is a pure function over it and safe for
    unlimited concurrent callers.
    """

    kpcount: int
    ref_keypoint: int
    band_fraction: float
    exemplars: dict[str, np.ndarray]  # exemplar_id -> normalized (T, K, 3)
    exemplar_variant: dict[str, str]
    variant_exemplars: dict[str, tuple[str, ...]]
    variant_label: dict[str, str]
    variant_entry: dict[str, str]
    entry_variants: dict[str, tuple[str, ...]]
    entry_gloss: dict[str, str]

    def __len__(self) -> int:
        return len(self.exemplars)


def build_index(
    bank: Bank,
    ref_keypoint: int = 0,
    band_fraction: float = DEFAULT_BAND_FRACTION,
) -> GalleryIndex:
    """Normalize every exemplar once and freeze the lookup structure."""
    exemplars: dict[str, np.ndarray] = {}
    exemplar_variant: dict[str, str] = {}
    for ex in bank.exemplars.values():
        exemplars[ex.exemplar_id] = normalize(ex.features, ref_keypoint).data
        exemplar_variant[ex.exemplar_id] = ex.variant_id
    return GalleryIndex(
        kpcount=bank.kpcount,
        ref_keypoint=ref_keypoint,
        band_fraction=band_fraction,
        exemplars=exemplars,
        exemplar_variant=exemplar_variant,
        variant_exemplars={v.variant_id: v.exemplar_ids for v in bank.variants.values()},
        variant_label={v.variant_id: v.label for v in bank.variants.values()},
        variant_entry={v.variant_id: v.entry_id for v in bank.variants.values()},
        entry_variants={e.entry_id: e.variant_ids for e in bank.entries.values()},
        entry_gloss={e.entry_id: e.base_gloss for e in bank.entries.values()},
    )


def _score_normalized(
    index: GalleryIndex, nq: np.ndarray, variant_id: str, mode: QueryMode
) -> float:
    best = math.inf
    m = nq.shape[0]
    for xid in index.variant_exemplars[variant_id]:
        ex = index.exemplars[xid]
        band = default_band(m, ex.shape[0], index.band_fraction)
        distance, path_len = _dtw_fast(nq, ex, band)
        score = float(distance) / path_len if mode is QueryMode.SEGMENTED else float(distance)
        if score < best:
            best = score
    return best


def score_variant(
    index: GalleryIndex, query: FeatureSequence, variant_id: str, mode: QueryMode
) -> float:
    """Smallest exemplar distance of the variant; segmented mode divides by path length."""
    if variant_id not in index.variant_exemplars:
        raise NotFound(f"unknown variant {variant_id!r}")
    if query.kpcount != index.kpcount:
        raise InvalidInput(f"query has K={query.kpcount}, gallery has K={index.kpcount}")
    nq = normalize(query, index.ref_keypoint).data
    return _score_normalized(index, np.ascontiguousarray(nq), variant_id, mode)


def rank(
    index: GalleryIndex, query: FeatureSequence, mode: QueryMode, k: int = DEFAULT_K
) -> CandidateList:
    """The k closest signs, ascending by score; ties broken by base gloss.

    Each candidate's score is the minimum over its variants, and every variant
    is carried along with its own score so the UI can offer the variant step.
    """
    if len(index) == 0:
        raise EmptyGallery("the gallery index holds no exemplars")
    if len(query) == 0:
        raise InvalidInput("query sequence is empty")
    if query.kpcount != index.kpcount:
        raise InvalidInput(f"query has K={query.kpcount}, gallery has K={index.kpcount}")
    nq = np.ascontiguousarray(normalize(query, index.ref_keypoint).data)

    variant_scores = {
        vid: _score_normalized(index, nq, vid, mode) for vid in index.variant_exemplars
    }
    scored_entries = []
    for entry_id, vids in index.entry_variants.items():
        entry_score = min(variant_scores[v] for v in vids)
        scored_entries.append((entry_score, index.entry_gloss[entry_id], entry_id))
    scored_entries.sort(key=lambda t: (t[0], t[1]))

    candidates = []
    for entry_score, gloss, entry_id in scored_entries[: max(k, 0)]:
        variants = sorted(
            (
                VariantScore(vid, index.variant_label[vid], variant_scores[vid])
                for vid in index.entry_variants[entry_id]
            ),
            key=lambda v: (v.score, v.label),
        )
        candidates.append(Candidate(entry_id, gloss, entry_score, tuple(variants)))
    return CandidateList(tuple(candidates), mode)


class DtwRecognizer:
    """Reference `Recognizer`: banded DTW k-NN over the gallery index."""

    def __init__(self, index: GalleryIndex, k: int = DEFAULT_K):
        self.index = index
        self.k = k

    def recognize(self, query: FeatureSequence, mode: QueryMode) -> CandidateList:
        return rank(self.index, query, mode, self.k)


def warm_up() -> None:
    """Trigger JIT compilation once so first-request latency stays flat."""
    frames = np.zeros((2, 1, 3))
    frames[:, :, 2] = 1.0
    seq = FeatureSequence(frames)
    dtw(seq, seq, band=1)


def exhaustive_entry_scores(
    index: GalleryIndex, query: FeatureSequence, mode: QueryMode
) -> dict[str, float]:
    """Per-entry minimum scores for every entry (no truncation); brute-force view of rank."""
    nq = np.ascontiguousarray(normalize(query, index.ref_keypoint).data)
    out = {}
    for entry_id, vids in index.entry_variants.items():
        out[entry_id] = min(_score_normalized(index, nq, v, mode) for v in vids)
    return out
