"""
Measuring Top-1 / Top-5 accuracy
================================

The eval harness replays labeled queries against the gallery and reports the
fraction answered correctly at rank 1 and within the top five, per query
mode. On a synthetic gallery with modest noise the matcher is near-perfect;
real-corpus numbers depend on the data and recognizer behind the contract.
"""

import numpy as np

from signlookup.evaluation import LabeledQuery, run_eval
from signlookup.features import FeatureSequence
from signlookup.matcher import QueryMode, build_index, normalize
from signlookup.signbank import import_bank

rng = np.random.default_rng(5)


def random_clip(frames: int, kpcount: int = 8) -> FeatureSequence:
    xy = np.cumsum(rng.normal(scale=0.12, size=(frames, kpcount, 2)), axis=0)
    conf = rng.uniform(0.6, 1.0, size=(frames, kpcount, 1))
    return FeatureSequence(np.concatenate([xy, conf], axis=2), fps=30.0)


def resample(seq: FeatureSequence, frames: int) -> FeatureSequence:
    t_src = np.linspace(0, 1, len(seq))
    t_dst = np.linspace(0, 1, frames)
    out = np.empty((frames, seq.kpcount, 3))
    for k in range(seq.kpcount):
        for c in range(3):
            out[:, k, c] = np.interp(t_dst, t_src, seq.data[:, k, c])
    out[:, :, 2] = np.clip(out[:, :, 2], 0, 1)
    return FeatureSequence(out, fps=seq.fps)


# 25 signs, 3 productions each: same prototype, varied tempo, small jitter.
entries = []
prototypes = {}
for i in range(25):
    gloss = f"SIGN-{i:03d}"
    proto = random_clip(int(rng.integers(22, 36)))
    prototypes[f"e-{i:03d}"] = proto
    exemplars = []
    for j in range(3):
        length = max(4, int(round(len(proto) * rng.uniform(0.85, 1.15))))
        production = resample(proto, length).data.copy()
        production[:, :, :2] += rng.normal(scale=0.05, size=production[:, :, :2].shape)
        exemplars.append(
            {
                "exemplar_id": f"x-{i:03d}-{j}",
                "provenance": "isolated",
                "features": {"kpcount": 8, "fps": 30.0, "frames": production.tolist()},
            }
        )
    entries.append(
        {
            "entry_id": f"e-{i:03d}",
            "base_gloss": gloss,
            "sign_class": "lexical",
            "variants": [
                {
                    "variant_id": f"v-{i:03d}",
                    "label": gloss,
                    "start_handshape_dom": "5",
                    "end_handshape_dom": "5",
                    "related_english_words": [],
                    "exemplars": exemplars,
                }
            ],
        }
    )

bank = import_bank({"schema": "sign-bank-manifest/1", "kpcount": 8, "entries": entries})
index = build_index(bank)
print(f"gallery: {len(bank.entries)} signs, {len(bank.exemplars)} exemplars")

# Queries: every exemplar, normalized, plus coordinate noise.
queries = []
for ex in bank.exemplars.values():
    canonical = normalize(ex.features)
    noisy = canonical.data.copy()
    noisy[:, :, :2] += rng.normal(scale=0.01, size=noisy[:, :, :2].shape)
    queries.append(
        LabeledQuery(FeatureSequence(noisy, fps=30.0), bank.variants[ex.variant_id].entry_id)
    )

report = run_eval(index, queries, [QueryMode.CITATION, QueryMode.SEGMENTED], workers=2)
for line in report.summary_lines():
    print(line)

# The confusion table shows where rank-1 predictions land (diagonal = correct).
citation = report.modes["citation"]
off_diagonal = sum(
    count
    for truth, row in citation.confusion.items()
    for predicted, count in row.items()
    if predicted != truth
)
print("rank-1 confusions off the diagonal:", off_diagonal)
