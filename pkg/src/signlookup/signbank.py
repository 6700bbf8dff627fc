"""The sign bank: entries, variants, exemplars, and multi-criteria search.

Every distinct sign production carries its own bank-wide-unique label; an
entry groups the variants of one base gloss. Banks are immutable snapshots
built by `import_bank`; updates are whole-bank reloads, which keeps concurrent
readers trivially safe.

Manifest document (UTF-8 JSON, feature paths relative to the manifest file):

    {
      "schema": "sign-bank-manifest/1",
      "kpcount": 10,
      "entries": [
        {
          "entry_id": "e-compare",
          "base_gloss": "COMPARE",
          "sign_class": "lexical",
          "variants": [
            {
              "variant_id": "833",
              "label": "COMPARE",
              "start_handshape_dom": "5", "end_handshape_dom": "5",
              "start_handshape_nondom": null, "end_handshape_nondom": null,
              "related_english_words": ["compare", "comparison", "contrast"],
              "exemplars": [
                {"exemplar_id": "x833-1", "provenance": "isolated",
                 "features": "features/compare-1.features",
                 "media": "media/compare-1.mp4"},
                {"exemplar_id": "x833-2", "provenance": "from_sentence",
                 "features": "features/compare-2.features",
                 "source_utterance": "utt-1042"}
              ]
            }
          ]
        }
      ]
    }

`exemplar.features` may also be an inline feature document (used by ingest
artifacts); `media` and `source_utterance` are optional, except that
`source_utterance` is required when provenance is "from_sentence".
`export_manifest` inverts `import_bank` losslessly for path-based manifests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import BankImportError, NotFound, ParseError, QueryError
from .features import FeatureSequence, dumps_features, load_feature_file, loads_features

MANIFEST_SCHEMA = "sign-bank-manifest/1"

# Sign classes the lookup vocabulary covers; everything else is rejected at import.
EXCLUDED_SIGN_CLASSES = ("fingerspelled", "classifier", "index", "gesture")

# Default handshape inventory. The real naming scheme is project-configurable,
# so imports accept any inventory supplied via `handshape_inventory` /
# `load_handshape_inventory`; this list only backs the common labels.
DEFAULT_HANDSHAPE_INVENTORY = (
    "1", "3", "4", "5", "8", "A", "B", "C", "D", "E", "F", "G", "I", "K", "L",
    "M", "N", "O", "R", "S", "T", "U", "V", "W", "X", "Y",
    "5-claw", "3-claw", "baby-O", "bent-B", "bent-V", "crvd-5", "flat-O",
    "horns", "ILY", "open-8",
)


class SignClass(str, Enum):
    LEXICAL = "lexical"
    LOAN = "loan"
    NUMBER = "number"
    COMPOUND = "compound"


class Provenance(str, Enum):
    ISOLATED = "isolated"
    FROM_SENTENCE = "from_sentence"


@dataclass(frozen=True)
class SignEntry:
    entry_id: str
    base_gloss: str
    sign_class: SignClass
    variant_ids: tuple[str, ...]


@dataclass(frozen=True)
class SignVariant:
    variant_id: str
    label: str
    entry_id: str
    start_handshape_dom: str
    end_handshape_dom: str
    start_handshape_nondom: str | None
    end_handshape_nondom: str | None
    related_english_words: tuple[str, ...]
    exemplar_ids: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Exemplar:
    exemplar_id: str
    variant_id: str
    provenance: Provenance
    features: FeatureSequence
    source_utterance: str | None = None
    features_path: str | None = None  # manifest-relative path, kept for round-trip
    media_path: str | None = None


@dataclass(frozen=True)
class SearchQuery:
    gloss_substring: str | None = None
    english_word: str | None = None
    start_handshape: str | None = None
    end_handshape: str | None = None

    def criteria(self) -> list[str]:
        return [
            name
            for name in ("gloss_substring", "english_word", "start_handshape", "end_handshape")
            if getattr(self, name) is not None
        ]


@dataclass(frozen=True)
class ExemplarView:
    exemplar_id: str
    source_utterance: str | None
    media_path: str | None


@dataclass(frozen=True)
class VariantView:
    variant_id: str
    label: str
    isolated: tuple[ExemplarView, ...]
    from_sentence: tuple[ExemplarView, ...]


@dataclass(frozen=True)
class EntryView:
    entry_id: str
    base_gloss: str
    sign_class: SignClass
    variants: tuple[VariantView, ...]


@dataclass(frozen=True, eq=False)
class Bank:
    """Immutable bank snapshot; safe to share across concurrent readers."""

    kpcount: int
    entries: Mapping[str, SignEntry]
    variants: Mapping[str, SignVariant]
    exemplars: Mapping[str, Exemplar]
    handshapes: frozenset[str]
    base_dir: Path | None = None
    manifest_extra: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def entry_for_variant(self, variant_id: str) -> SignEntry:
        variant = self.variants.get(variant_id)
        if variant is None:
            raise NotFound(f"unknown variant {variant_id!r}")
        return self.entries[variant.entry_id]

    def search(self, q: SearchQuery) -> list[SignVariant]:
        """Variants satisfying the conjunction of all present criteria, by label."""
        if not q.criteria():
            raise QueryError("search query must carry at least one criterion")
        hits = []
        for variant in self.variants.values():
            if q.gloss_substring is not None and q.gloss_substring.lower() not in variant.label.lower():
                continue
            if q.english_word is not None and q.english_word.lower() not in variant.related_english_words:
                continue
            if q.start_handshape is not None and variant.start_handshape_dom != q.start_handshape:
                continue
            if q.end_handshape is not None and variant.end_handshape_dom != q.end_handshape:
                continue
            hits.append(variant)
        hits.sort(key=lambda v: v.label)
        return hits

    def related_words(self, variant_id: str) -> list[str]:
        """The variant's related English words, verbatim and in stored order."""
        variant = self.variants.get(variant_id)
        if variant is None:
            raise NotFound(f"unknown variant {variant_id!r}")
        return list(variant.related_english_words)

    def entry_view(self, entry_id: str) -> EntryView:
        """Per-variant exemplars partitioned by provenance, for entry-page display."""
        entry = self.entries.get(entry_id)
        if entry is None:
            raise NotFound(f"unknown entry {entry_id!r}")
        views = []
        for vid in entry.variant_ids:
            variant = self.variants[vid]
            isolated = []
            from_sentence = []
            for xid in variant.exemplar_ids:
                ex = self.exemplars[xid]
                view = ExemplarView(ex.exemplar_id, ex.source_utterance, ex.media_path)
                if ex.provenance is Provenance.ISOLATED:
                    isolated.append(view)
                else:
                    from_sentence.append(view)
            views.append(VariantView(vid, variant.label, tuple(isolated), tuple(from_sentence)))
        return EntryView(entry.entry_id, entry.base_gloss, entry.sign_class, tuple(views))


def load_handshape_inventory(path: str | Path) -> tuple[str, ...]:
    """Read a handshape inventory config file: a JSON array of label strings."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read handshape inventory {path}: {exc}") from exc
    if not isinstance(doc, list) or not all(isinstance(s, str) for s in doc):
        raise ParseError("handshape inventory must be a JSON array of strings")
    return tuple(doc)


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise BankImportError("structure", f"{where} is missing field {key!r}")
    return doc[key]


def import_bank(
    manifest: str | Path | dict,
    handshape_inventory: Iterable[str] | None = None,
) -> Bank:
    """Build an immutable bank snapshot from a manifest document.

    `manifest` is a path to a manifest file, or an already-parsed document
    (then feature references must be inline or absolute). Import is
    deterministic: the same manifest bytes produce an identical snapshot.
    """
    base_dir: Path | None = None
    if isinstance(manifest, (str, Path)):
        path = Path(manifest)
        base_dir = path.parent
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise BankImportError("reference", f"cannot read manifest {path}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BankImportError("structure", f"manifest is not valid JSON: {exc}") from exc
    else:
        doc = manifest
    if not isinstance(doc, dict):
        raise BankImportError("structure", "manifest must be a JSON object")
    schema = doc.get("schema")
    if schema != MANIFEST_SCHEMA:
        raise BankImportError("structure", f"unsupported manifest schema {schema!r}")
    kpcount = _require(doc, "kpcount", "manifest")
    if not isinstance(kpcount, int) or kpcount < 1:
        raise BankImportError("structure", "manifest kpcount must be a positive integer")

    inventory = frozenset(
        handshape_inventory if handshape_inventory is not None else DEFAULT_HANDSHAPE_INVENTORY
    )

    entries: dict[str, SignEntry] = {}
    variants: dict[str, SignVariant] = {}
    exemplars: dict[str, Exemplar] = {}
    seen_glosses: set[str] = set()
    seen_labels: set[str] = set()

    entry_docs = _require(doc, "entries", "manifest")
    if not isinstance(entry_docs, list):
        raise BankImportError("structure", "manifest entries must be a list")

    for entry_doc in entry_docs:
        entry_id = str(_require(entry_doc, "entry_id", "entry"))
        base_gloss = str(_require(entry_doc, "base_gloss", f"entry {entry_id}"))
        if not base_gloss:
            raise BankImportError("structure", f"entry {entry_id} has an empty base_gloss")
        raw_class = str(_require(entry_doc, "sign_class", f"entry {entry_id}"))
        if raw_class in EXCLUDED_SIGN_CLASSES:
            raise BankImportError(
                "class", f"entry {entry_id}: sign class {raw_class!r} is not in the lookup vocabulary"
            )
        try:
            sign_class = SignClass(raw_class)
        except ValueError:
            raise BankImportError("class", f"entry {entry_id}: unknown sign class {raw_class!r}") from None
        if base_gloss in seen_glosses:
            raise BankImportError("duplicate", f"duplicate base gloss {base_gloss!r}")
        seen_glosses.add(base_gloss)
        if entry_id in entries:
            raise BankImportError("duplicate", f"duplicate entry id {entry_id!r}")

        variant_docs = _require(entry_doc, "variants", f"entry {entry_id}")
        if not isinstance(variant_docs, list) or not variant_docs:
            raise BankImportError("structure", f"entry {entry_id} must list at least one variant")

        variant_ids = []
        for vdoc in variant_docs:
            variant = _import_variant(vdoc, entry_id, inventory, kpcount, base_dir, exemplars)
            if variant.label in seen_labels:
                raise BankImportError("duplicate", f"duplicate variant label {variant.label!r}")
            seen_labels.add(variant.label)
            if variant.variant_id in variants:
                raise BankImportError("duplicate", f"duplicate variant id {variant.variant_id!r}")
            variants[variant.variant_id] = variant
            variant_ids.append(variant.variant_id)

        entries[entry_id] = SignEntry(entry_id, base_gloss, sign_class, tuple(variant_ids))

    extra = {k: v for k, v in doc.items() if k not in ("schema", "kpcount", "entries")}
    return Bank(
        kpcount=kpcount,
        entries=entries,
        variants=variants,
        exemplars=exemplars,
        handshapes=inventory,
        base_dir=base_dir,
        manifest_extra=extra,
    )


def _import_variant(
    vdoc: dict,
    entry_id: str,
    inventory: frozenset[str],
    kpcount: int,
    base_dir: Path | None,
    exemplars: dict[str, Exemplar],
) -> SignVariant:
    variant_id = str(_require(vdoc, "variant_id", "variant"))
    label = str(_require(vdoc, "label", f"variant {variant_id}"))
    if not label:
        raise BankImportError("structure", f"variant {variant_id} has an empty label")

    handshapes = {}
    for fieldname in ("start_handshape_dom", "end_handshape_dom"):
        value = _require(vdoc, fieldname, f"variant {variant_id}")
        if value not in inventory:
            raise BankImportError(
                "reference", f"variant {variant_id}: handshape {value!r} is not in the inventory"
            )
        handshapes[fieldname] = value
    for fieldname in ("start_handshape_nondom", "end_handshape_nondom"):
        value = vdoc.get(fieldname)
        if value is not None and value not in inventory:
            raise BankImportError(
                "reference", f"variant {variant_id}: handshape {value!r} is not in the inventory"
            )
        handshapes[fieldname] = value

    words = vdoc.get("related_english_words", [])
    if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
        raise BankImportError("structure", f"variant {variant_id}: related_english_words must be strings")
    words = tuple(w.lower() for w in words)

    exemplar_docs = _require(vdoc, "exemplars", f"variant {variant_id}")
    if not isinstance(exemplar_docs, list) or not exemplar_docs:
        raise BankImportError("structure", f"variant {variant_id} must list at least one exemplar")

    exemplar_ids = []
    for xdoc in exemplar_docs:
        ex = _import_exemplar(xdoc, variant_id, kpcount, base_dir)
        if ex.exemplar_id in exemplars:
            raise BankImportError("duplicate", f"duplicate exemplar id {ex.exemplar_id!r}")
        exemplars[ex.exemplar_id] = ex
        exemplar_ids.append(ex.exemplar_id)

    return SignVariant(
        variant_id=variant_id,
        label=label,
        entry_id=entry_id,
        start_handshape_dom=handshapes["start_handshape_dom"],
        end_handshape_dom=handshapes["end_handshape_dom"],
        start_handshape_nondom=handshapes["start_handshape_nondom"],
        end_handshape_nondom=handshapes["end_handshape_nondom"],
        related_english_words=words,
        exemplar_ids=tuple(exemplar_ids),
    )


def _import_exemplar(
    xdoc: dict, variant_id: str, kpcount: int, base_dir: Path | None
) -> Exemplar:
    exemplar_id = str(_require(xdoc, "exemplar_id", f"exemplar of variant {variant_id}"))
    raw_prov = str(_require(xdoc, "provenance", f"exemplar {exemplar_id}"))
    try:
        provenance = Provenance(raw_prov)
    except ValueError:
        raise BankImportError(
            "structure", f"exemplar {exemplar_id}: unknown provenance {raw_prov!r}"
        ) from None
    source_utterance = xdoc.get("source_utterance")
    if provenance is Provenance.FROM_SENTENCE and not source_utterance:
        raise BankImportError(
            "reference", f"exemplar {exemplar_id} is from a sentence but names no source utterance"
        )

    features_ref = _require(xdoc, "features", f"exemplar {exemplar_id}")
    features_path: str | None = None
    if isinstance(features_ref, str):
        features_path = features_ref
        path = Path(features_ref)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            raise BankImportError("reference", f"exemplar {exemplar_id}: feature file {path} does not exist")
        try:
            seq = load_feature_file(path)
        except ParseError as exc:
            raise BankImportError("reference", f"exemplar {exemplar_id}: {exc}") from exc
    elif isinstance(features_ref, dict):
        try:
            seq = loads_features(json.dumps(features_ref))
        except ParseError as exc:
            raise BankImportError("structure", f"exemplar {exemplar_id}: {exc}") from exc
    else:
        raise BankImportError("structure", f"exemplar {exemplar_id}: features must be a path or document")

    if seq.kpcount != kpcount:
        raise BankImportError(
            "structure",
            f"exemplar {exemplar_id} has {seq.kpcount} keypoints but the manifest declares {kpcount}",
        )

    return Exemplar(
        exemplar_id=exemplar_id,
        variant_id=variant_id,
        provenance=provenance,
        features=seq,
        source_utterance=source_utterance,
        features_path=features_path,
        media_path=xdoc.get("media"),
    )


def export_manifest(bank: Bank, inline_features: bool = False) -> dict:
    """Reconstruct the manifest document for a bank snapshot.

    With `inline_features=True` every exemplar embeds its feature document
    (used by ingest artifacts); otherwise the original relative paths are kept.
    """
    entries = []
    for entry in bank.entries.values():
        variant_docs = []
        for vid in entry.variant_ids:
            variant = bank.variants[vid]
            exemplar_docs = []
            for xid in variant.exemplar_ids:
                ex = bank.exemplars[xid]
                if inline_features or ex.features_path is None:
                    features_ref: str | dict = json.loads(dumps_features(ex.features))
                else:
                    features_ref = ex.features_path
                xdoc: dict = {
                    "exemplar_id": ex.exemplar_id,
                    "provenance": ex.provenance.value,
                    "features": features_ref,
                }
                if ex.source_utterance is not None:
                    xdoc["source_utterance"] = ex.source_utterance
                if ex.media_path is not None:
                    xdoc["media"] = ex.media_path
                exemplar_docs.append(xdoc)
            variant_docs.append(
                {
                    "variant_id": variant.variant_id,
                    "label": variant.label,
                    "start_handshape_dom": variant.start_handshape_dom,
                    "end_handshape_dom": variant.end_handshape_dom,
                    "start_handshape_nondom": variant.start_handshape_nondom,
                    "end_handshape_nondom": variant.end_handshape_nondom,
                    "related_english_words": list(variant.related_english_words),
                    "exemplars": exemplar_docs,
                }
            )
        entries.append(
            {
                "entry_id": entry.entry_id,
                "base_gloss": entry.base_gloss,
                "sign_class": entry.sign_class.value,
                "variants": variant_docs,
            }
        )
    doc = {"schema": MANIFEST_SCHEMA, "kpcount": bank.kpcount, "entries": entries}
    doc.update(bank.manifest_extra)
    return doc
