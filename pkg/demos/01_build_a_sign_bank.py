"""
Build a sign bank and search it
===============================

A bank manifest lists entries (one per base gloss), their uniquely-labeled
variants, and each variant's exemplar feature files. This demo writes a tiny
manifest tree to a temp directory, imports it, and runs the search styles the
bank supports: gloss substring, related English word, and start/end
handshapes.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from signlookup.features import FeatureSequence, save_feature_file
from signlookup.signbank import SearchQuery, import_bank

rng = np.random.default_rng(7)


def random_clip(frames: int, kpcount: int = 8) -> FeatureSequence:
    xy = np.cumsum(rng.normal(scale=0.1, size=(frames, kpcount, 2)), axis=0)
    conf = rng.uniform(0.7, 1.0, size=(frames, kpcount, 1))
    return FeatureSequence(np.concatenate([xy, conf], axis=2), fps=30.0)


root = Path(tempfile.mkdtemp(prefix="signbank-demo-"))
(root / "features").mkdir()

# Two entries: COMPARE with one variant, AMBULANCE with two.
manifest = {
    "schema": "sign-bank-manifest/1",
    "kpcount": 8,
    "entries": [
        {
            "entry_id": "e-compare",
            "base_gloss": "COMPARE",
            "sign_class": "lexical",
            "variants": [
                {
                    "variant_id": "833",
                    "label": "COMPARE",
                    "start_handshape_dom": "5",
                    "end_handshape_dom": "5",
                    "related_english_words": ["compare", "comparison", "contrast"],
                    "exemplars": [
                        {
                            "exemplar_id": "x833-1",
                            "provenance": "isolated",
                            "features": "features/x833-1.features",
                        },
                        {
                            "exemplar_id": "x833-2",
                            "provenance": "from_sentence",
                            "features": "features/x833-2.features",
                            "source_utterance": "utt-1042",
                        },
                    ],
                }
            ],
        },
        {
            "entry_id": "e-ambulance",
            "base_gloss": "AMBULANCE",
            "sign_class": "lexical",
            "variants": [
                {
                    "variant_id": "700",
                    "label": "AMBULANCE",
                    "start_handshape_dom": "5",
                    "end_handshape_dom": "5",
                    "related_english_words": ["ambulance", "siren"],
                    "exemplars": [
                        {
                            "exemplar_id": "x700",
                            "provenance": "isolated",
                            "features": "features/x700.features",
                        }
                    ],
                },
                {
                    "variant_id": "701",
                    "label": "AMBULANCE-2",
                    "start_handshape_dom": "5",
                    "end_handshape_dom": "B",
                    "related_english_words": ["ambulance", "emergency"],
                    "exemplars": [
                        {
                            "exemplar_id": "x701",
                            "provenance": "isolated",
                            "features": "features/x701.features",
                        }
                    ],
                },
            ],
        },
    ],
}

for xid in ("x833-1", "x833-2", "x700", "x701"):
    save_feature_file(random_clip(frames=int(rng.integers(16, 28))), root / f"features/{xid}.features")

manifest_path = root / "manifest.json"
manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")

bank = import_bank(manifest_path)
print(f"imported bank: {len(bank.entries)} entries, {len(bank.variants)} variants")

# Search by related English word: exact, case-insensitive word match.
hits = bank.search(SearchQuery(english_word="contrast"))
print("word 'contrast' ->", [(v.variant_id, v.label) for v in hits])

# Search by gloss substring: case-insensitive substring of the variant label.
hits = bank.search(SearchQuery(gloss_substring="ambul"))
print("gloss 'ambul'   ->", [v.label for v in hits])

# Criteria combine conjunctively.
hits = bank.search(SearchQuery(start_handshape="5", end_handshape="B"))
print("hs 5 -> B       ->", [v.label for v in hits])

# Per-variant word lists and the provenance-partitioned entry view.
print("related words for 833:", bank.related_words("833"))
view = bank.entry_view("e-compare")
for variant in view.variants:
    print(
        f"entry {view.base_gloss} / variant {variant.label}: "
        f"{len(variant.isolated)} isolated, {len(variant.from_sentence)} from sentences"
    )
