"""Annotation-document integration: look up an unknown sign inside an
utterance's feature track and insert the confirmed sign's property bundle.

The document model is deliberately minimal - utterances with a feature track
and non-overlapping sign tokens - and all operations are pure: they return a
new document and never mutate their input, so the host annotation tool owns
persistence. Segments are indexed by frame; time-based callers convert via
the track fps.

Document format (UTF-8 JSON, canonical serialization is byte-stable):

    {
      "schema": "annotation-doc/1",
      "doc_id": "...",
      "utterances": [
        {
          "utterance_id": "...",
          "media_ref": "...",
          "features": { ... feature-sequence document ... },
          "sign_tokens": [
            {"start_frame": 10, "end_frame": 42, "properties": { ... } | null}
          ]
        }
      ]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import NotFound, Overlap, ParseError, RangeError
from .features import FeatureSequence, dumps_features, loads_features
from .matcher import CandidateList, QueryMode, Recognizer
from .signbank import Bank

ANNOTATION_SCHEMA = "annotation-doc/1"


@dataclass(frozen=True)
class SignPropertiesRecord:
    """The property bundle inserted on confirmation, copied verbatim from the bank."""

    base_gloss: str
    variant_label: str
    variant_id: str
    sign_class: str
    start_handshape_dom: str
    end_handshape_dom: str
    start_handshape_nondom: str | None
    end_handshape_nondom: str | None
    related_english_words: tuple[str, ...]


@dataclass(frozen=True)
class SignToken:
    start_frame: int
    end_frame: int
    properties: SignPropertiesRecord | None = None


@dataclass(frozen=True, eq=False)
class Utterance:
    utterance_id: str
    media_ref: str
    features: FeatureSequence
    sign_tokens: tuple[SignToken, ...] = ()


@dataclass(frozen=True, eq=False)
class AnnotationDoc:
    doc_id: str
    utterances: tuple[Utterance, ...] = ()

    def utterance(self, utterance_id: str) -> Utterance:
        for utt in self.utterances:
            if utt.utterance_id == utterance_id:
                return utt
        raise NotFound(f"unknown utterance {utterance_id!r}")


def _check_bounds(utt: Utterance, start_frame: int, end_frame: int) -> None:
    if not (0 <= start_frame < end_frame <= len(utt.features)):
        raise RangeError(
            f"frame range [{start_frame}, {end_frame}) is outside the "
            f"{len(utt.features)}-frame track of {utt.utterance_id!r}"
        )


def lookup_segment(
    doc: AnnotationDoc,
    utterance_id: str,
    start_frame: int,
    end_frame: int,
    recognizer: Recognizer,
) -> CandidateList:
    """Recognize the sign spanning frames [start_frame, end_frame) of an utterance.

    Segments come from continuous signing, so recognition always runs in
    segmented mode. The range must cover at least two frames.
    """
    utt = doc.utterance(utterance_id)
    _check_bounds(utt, start_frame, end_frame)
    if end_frame - start_frame < 2:
        raise RangeError("a lookup segment needs at least two frames")
    segment = utt.features.segment(start_frame, end_frame)
    return recognizer.recognize(segment, QueryMode.SEGMENTED)


def properties_for_variant(bank: Bank, variant_id: str) -> SignPropertiesRecord:
    """The full property bundle of a variant, field-for-field from the bank."""
    variant = bank.variants.get(variant_id)
    if variant is None:
        raise NotFound(f"unknown variant {variant_id!r}")
    entry = bank.entries[variant.entry_id]
    return SignPropertiesRecord(
        base_gloss=entry.base_gloss,
        variant_label=variant.label,
        variant_id=variant.variant_id,
        sign_class=entry.sign_class.value,
        start_handshape_dom=variant.start_handshape_dom,
        end_handshape_dom=variant.end_handshape_dom,
        start_handshape_nondom=variant.start_handshape_nondom,
        end_handshape_nondom=variant.end_handshape_nondom,
        related_english_words=variant.related_english_words,
    )


def insert_all_data(
    doc: AnnotationDoc,
    utterance_id: str,
    start_frame: int,
    end_frame: int,
    variant_id: str,
    bank: Bank,
) -> AnnotationDoc:
    """A new document with a sign token carrying the variant's properties.

    The token must not overlap an existing one; tokens stay sorted by start
    frame. The input document is left untouched.
    """
    utt = doc.utterance(utterance_id)
    _check_bounds(utt, start_frame, end_frame)
    for token in utt.sign_tokens:
        if start_frame < token.end_frame and token.start_frame < end_frame:
            raise Overlap(
                f"[{start_frame}, {end_frame}) overlaps existing token "
                f"[{token.start_frame}, {token.end_frame})"
            )
    record = properties_for_variant(bank, variant_id)
    tokens = sorted(
        utt.sign_tokens + (SignToken(start_frame, end_frame, record),),
        key=lambda t: t.start_frame,
    )
    new_utt = replace(utt, sign_tokens=tuple(tokens))
    return replace(
        doc,
        utterances=tuple(new_utt if u.utterance_id == utterance_id else u for u in doc.utterances),
    )


def _record_to_dict(record: SignPropertiesRecord) -> dict:
    return {
        "base_gloss": record.base_gloss,
        "variant_label": record.variant_label,
        "variant_id": record.variant_id,
        "sign_class": record.sign_class,
        "start_handshape_dom": record.start_handshape_dom,
        "end_handshape_dom": record.end_handshape_dom,
        "start_handshape_nondom": record.start_handshape_nondom,
        "end_handshape_nondom": record.end_handshape_nondom,
        "related_english_words": list(record.related_english_words),
    }


def _record_from_dict(doc: dict) -> SignPropertiesRecord:
    try:
        return SignPropertiesRecord(
            base_gloss=doc["base_gloss"],
            variant_label=doc["variant_label"],
            variant_id=doc["variant_id"],
            sign_class=doc["sign_class"],
            start_handshape_dom=doc["start_handshape_dom"],
            end_handshape_dom=doc["end_handshape_dom"],
            start_handshape_nondom=doc.get("start_handshape_nondom"),
            end_handshape_nondom=doc.get("end_handshape_nondom"),
            related_english_words=tuple(doc.get("related_english_words", [])),
        )
    except KeyError as exc:
        raise ParseError(f"sign properties record is missing field {exc.args[0]!r}") from exc


def dumps_annotation(doc: AnnotationDoc) -> str:
    """Canonical serialization; serialize -> parse -> serialize is byte-identical."""
    payload = {
        "schema": ANNOTATION_SCHEMA,
        "doc_id": doc.doc_id,
        "utterances": [
            {
                "utterance_id": utt.utterance_id,
                "media_ref": utt.media_ref,
                "features": json.loads(dumps_features(utt.features)),
                "sign_tokens": [
                    {
                        "start_frame": t.start_frame,
                        "end_frame": t.end_frame,
                        "properties": _record_to_dict(t.properties) if t.properties else None,
                    }
                    for t in utt.sign_tokens
                ],
            }
            for utt in doc.utterances
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def loads_annotation(text: str) -> AnnotationDoc:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"annotation document is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("schema") != ANNOTATION_SCHEMA:
        raise ParseError(f"expected an {ANNOTATION_SCHEMA} document")
    utterances = []
    for udoc in payload.get("utterances", []):
        try:
            features = loads_features(json.dumps(udoc["features"]))
            tokens = []
            for tdoc in udoc.get("sign_tokens", []):
                start, end = int(tdoc["start_frame"]), int(tdoc["end_frame"])
                if not (0 <= start < end <= len(features)):
                    raise ParseError(f"sign token [{start}, {end}) is out of bounds")
                props = tdoc.get("properties")
                tokens.append(
                    SignToken(start, end, _record_from_dict(props) if props else None)
                )
            tokens.sort(key=lambda t: t.start_frame)
            for prev, cur in zip(tokens, tokens[1:]):
                if cur.start_frame < prev.end_frame:
                    raise ParseError("sign tokens overlap within an utterance")
            utterances.append(
                Utterance(
                    utterance_id=udoc["utterance_id"],
                    media_ref=udoc.get("media_ref", ""),
                    features=features,
                    sign_tokens=tuple(tokens),
                )
            )
        except KeyError as exc:
            raise ParseError(f"utterance is missing field {exc.args[0]!r}") from exc
    return AnnotationDoc(doc_id=payload.get("doc_id", ""), utterances=tuple(utterances))


def load_annotation_file(path: str | Path) -> AnnotationDoc:
    return loads_annotation(Path(path).read_text(encoding="utf-8"))


def save_annotation_file(doc: AnnotationDoc, path: str | Path) -> None:
    Path(path).write_text(dumps_annotation(doc), encoding="utf-8")
