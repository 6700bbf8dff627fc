"""
Looking up a sign inside an annotation document
===============================================

An annotator sets start and end frames around an unknown sign in an
utterance, looks it up against the gallery, and - once the right candidate is
confirmed - inserts the sign's full property bundle (gloss, variant label,
class, handshapes, related words) as a sign token. Insertion is pure: the
original document is untouched and the format round-trips byte-for-byte.
"""

import numpy as np

from signlookup.annotation import (
    AnnotationDoc,
    Utterance,
    dumps_annotation,
    insert_all_data,
    loads_annotation,
    lookup_segment,
)
from signlookup.features import FeatureSequence
from signlookup.matcher import DtwRecognizer, build_index
from signlookup.signbank import import_bank

rng = np.random.default_rng(4)


def random_clip(frames: int, kpcount: int = 8) -> FeatureSequence:
    xy = np.cumsum(rng.normal(scale=0.1, size=(frames, kpcount, 2)), axis=0)
    conf = rng.uniform(0.7, 1.0, size=(frames, kpcount, 1))
    return FeatureSequence(np.concatenate([xy, conf], axis=2), fps=30.0)


# Gallery with the second results-row signs; HONOR is the one we will find.
glosses = ["CARELESS", "HONOR", "WORRY", "VERY", "RESPECT"]
clips = {g: random_clip(int(rng.integers(20, 30))) for g in glosses}
bank = import_bank(
    {
        "schema": "sign-bank-manifest/1",
        "kpcount": 8,
        "entries": [
            {
                "entry_id": f"e-{g.lower()}",
                "base_gloss": g,
                "sign_class": "lexical",
                "variants": [
                    {
                        "variant_id": f"v-{g.lower()}",
                        "label": g,
                        "start_handshape_dom": "B",
                        "end_handshape_dom": "B",
                        "related_english_words": [g.lower()],
                        "exemplars": [
                            {
                                "exemplar_id": f"x-{g.lower()}",
                                "provenance": "isolated",
                                "features": {
                                    "kpcount": 8,
                                    "fps": 30.0,
                                    "frames": clips[g].data.tolist(),
                                },
                            }
                        ],
                    }
                ],
            }
            for g in glosses
        ],
    }
)
recognizer = DtwRecognizer(build_index(bank))

# An utterance track with an HONOR production embedded between other signing.
honor = clips["HONOR"].data.copy()
honor[:, :, :2] += rng.normal(scale=0.005, size=honor[:, :, :2].shape)
track = np.concatenate([random_clip(14).data, honor, random_clip(10).data], axis=0)
doc = AnnotationDoc(
    "session-042",
    (Utterance("utt-7", "session-042.mp4", FeatureSequence(track, fps=30.0)),),
)
start, end = 14, 14 + len(honor)

# The annotator marked [start, end); look the segment up (segmented mode).
candidates = lookup_segment(doc, "utt-7", start, end, recognizer)
print("segment candidates:", ", ".join(candidates.glosses()))

# Confirmed: insert all data for the chosen variant into the document.
updated = insert_all_data(doc, "utt-7", start, end, "v-honor", bank)
token = updated.utterance("utt-7").sign_tokens[0]
print(
    f"inserted token [{token.start_frame}, {token.end_frame}):",
    token.properties.base_gloss,
    "/",
    token.properties.variant_label,
    token.properties.related_english_words,
)
print("original document still has", len(doc.utterance("utt-7").sign_tokens), "tokens")

# The document format is round-trip stable.
text = dumps_annotation(updated)
assert dumps_annotation(loads_annotation(text)) == text
print("serialize -> parse -> serialize is byte-identical:", len(text), "bytes")
