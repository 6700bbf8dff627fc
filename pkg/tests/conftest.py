"""Shared fixtures: tiny banks mirroring the published screenshots (COMPARE /
AMBULANCE / the five DANCE-row candidates) and seeded synthetic galleries."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from signlookup.features import FeatureSequence, dumps_features
from signlookup.matcher import build_index, warm_up
from signlookup.signbank import import_bank

FIXTURE_K = 8
GALLERY_SEED = 20240814


def make_walk_seq(rng: np.random.Generator, frames: int, kpcount: int) -> FeatureSequence:
    """A smooth random-walk pose sequence with confidences in [0.6, 1.0]."""
    start = rng.normal(scale=1.0, size=(1, kpcount, 2))
    steps = rng.normal(scale=0.12, size=(frames, kpcount, 2))
    xy = start + np.cumsum(steps, axis=0)
    conf = rng.uniform(0.6, 1.0, size=(frames, kpcount, 1))
    return FeatureSequence(np.concatenate([xy, conf], axis=2), fps=30.0)


def resample_time(seq: FeatureSequence, frames: int) -> FeatureSequence:
    """Linear time-resampling; models duration variation between productions."""
    src = seq.data
    t_src = np.linspace(0.0, 1.0, len(seq))
    t_dst = np.linspace(0.0, 1.0, frames)
    out = np.empty((frames, seq.kpcount, 3))
    for k in range(seq.kpcount):
        for c in range(3):
            out[:, k, c] = np.interp(t_dst, t_src, src[:, k, c])
    out[:, :, 2] = np.clip(out[:, :, 2], 0.0, 1.0)
    return FeatureSequence(out, fps=seq.fps)


def jitter(seq: FeatureSequence, rng: np.random.Generator, sigma: float) -> FeatureSequence:
    out = seq.data.copy()
    out[:, :, :2] += rng.normal(scale=sigma, size=out[:, :, :2].shape)
    return FeatureSequence(out, fps=seq.fps)


def seq_doc(seq: FeatureSequence) -> dict:
    return json.loads(dumps_features(seq))


def exemplar_doc(exemplar_id, seq, provenance="isolated", source_utterance=None, media=None):
    doc = {"exemplar_id": exemplar_id, "provenance": provenance, "features": seq_doc(seq)}
    if source_utterance is not None:
        doc["source_utterance"] = source_utterance
    if media is not None:
        doc["media"] = media
    return doc


def variant_doc(variant_id, label, exemplars, words=(), start_hs="5", end_hs="5",
                start_nondom=None, end_nondom=None):
    return {
        "variant_id": variant_id,
        "label": label,
        "start_handshape_dom": start_hs,
        "end_handshape_dom": end_hs,
        "start_handshape_nondom": start_nondom,
        "end_handshape_nondom": end_nondom,
        "related_english_words": list(words),
        "exemplars": exemplars,
    }


def entry_doc(entry_id, base_gloss, variants, sign_class="lexical"):
    return {
        "entry_id": entry_id,
        "base_gloss": base_gloss,
        "sign_class": sign_class,
        "variants": variants,
    }


def manifest_doc(entries, kpcount=FIXTURE_K):
    return {"schema": "sign-bank-manifest/1", "kpcount": kpcount, "entries": entries}


def simple_gallery_doc(glosses: list[str], seed: int, kpcount: int = FIXTURE_K,
                       frames_lo: int = 20, frames_hi: int = 34) -> dict:
    """One entry per gloss, one variant, one isolated exemplar, seeded."""
    rng = np.random.default_rng(seed)
    entries = []
    for i, gloss in enumerate(glosses):
        seq = make_walk_seq(rng, int(rng.integers(frames_lo, frames_hi + 1)), kpcount)
        entries.append(
            entry_doc(
                f"e-{gloss.lower()}",
                gloss,
                [variant_doc(f"v-{gloss.lower()}", gloss, [exemplar_doc(f"x-{gloss.lower()}", seq)])],
            )
        )
    return manifest_doc(entries, kpcount)


@pytest.fixture(scope="session", autouse=True)
def _warm_jit():
    warm_up()


@pytest.fixture(scope="session")
def fig7_bank():
    """The COMPARE entry of the sign-bank screenshots: variant 833 with its
    related English words, one isolated and one from-sentence exemplar."""
    rng = np.random.default_rng(7)
    doc = manifest_doc(
        [
            entry_doc(
                "e-compare",
                "COMPARE",
                [
                    variant_doc(
                        "833",
                        "COMPARE",
                        [
                            exemplar_doc("x833-1", make_walk_seq(rng, 18, FIXTURE_K)),
                            exemplar_doc(
                                "x833-2",
                                make_walk_seq(rng, 22, FIXTURE_K),
                                provenance="from_sentence",
                                source_utterance="utt-1042",
                            ),
                        ],
                        words=["compare", "comparison", "contrast"],
                    )
                ],
            )
        ]
    )
    return import_bank(doc)


def search_bank_doc() -> dict:
    """A bank exercising every search criterion: COMPARE (Figure-7 row),
    AMBULANCE with two variants, and VERY/EVERYDAY word-boundary guards."""
    rng = np.random.default_rng(42)

    def ex(xid, provenance="isolated", source_utterance=None):
        return exemplar_doc(xid, make_walk_seq(rng, 16, FIXTURE_K), provenance, source_utterance)

    entries = [
        entry_doc(
            "e-compare",
            "COMPARE",
            [
                variant_doc(
                    "833", "COMPARE",
                    [ex("x833-1"), ex("x833-2", "from_sentence", "utt-1042")],
                    words=["compare", "comparison", "contrast"],
                    start_hs="5", end_hs="5",
                )
            ],
        ),
        entry_doc(
            "e-ambulance",
            "AMBULANCE",
            [
                variant_doc("700", "AMBULANCE", [ex("x700")], words=["ambulance", "siren"],
                            start_hs="5", end_hs="5"),
                variant_doc("701", "AMBULANCE-2", [ex("x701")], words=["ambulance", "emergency"],
                            start_hs="5", end_hs="B"),
            ],
        ),
        entry_doc(
            "e-very",
            "VERY",
            [variant_doc("730", "VERY", [ex("x730")], words=["very"], start_hs="V", end_hs="V")],
        ),
        entry_doc(
            "e-everyday",
            "EVERYDAY",
            [variant_doc("731", "EVERYDAY", [ex("x731")], words=["every", "daily"],
                         start_hs="A", end_hs="A")],
        ),
    ]
    return manifest_doc(entries)


@pytest.fixture(scope="session")
def search_bank():
    return import_bank(search_bank_doc())


FIG3_GLOSSES = ["DANCE", "IRON-CLOTHES", "STIR", "BAKING-SPRINKLES", "SAUCE"]
HONOR_ROW_GLOSSES = ["CARELESS", "HONOR", "WORRY", "VERY", "RESPECT"]


@pytest.fixture(scope="session")
def fig3_bank():
    """Five-entry gallery matching the first results-screen example."""
    return import_bank(simple_gallery_doc(FIG3_GLOSSES, seed=3))


@pytest.fixture(scope="session")
def fig3_index(fig3_bank):
    return build_index(fig3_bank)


@pytest.fixture(scope="session")
def honor_bank():
    """Five-entry gallery matching the second results-screen example."""
    return import_bank(simple_gallery_doc(HONOR_ROW_GLOSSES, seed=9))


def synthetic_gallery_doc(
    n_entries: int = 50,
    n_exemplars: int = 3,
    kpcount: int = FIXTURE_K,
    seed: int = GALLERY_SEED,
) -> dict:
    """Entries are independent prototypes; exemplars are time-resampled,
    jittered productions of their entry's prototype."""
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(n_entries):
        gloss = f"SIGN-{i:03d}"
        proto_len = int(rng.integers(24, 40))
        proto = make_walk_seq(rng, proto_len, kpcount)
        exemplars = []
        for j in range(n_exemplars):
            length = int(round(proto_len * rng.uniform(0.85, 1.15)))
            production = jitter(resample_time(proto, max(length, 4)), rng, sigma=0.05)
            exemplars.append(exemplar_doc(f"x-{i:03d}-{j}", production))
        entries.append(
            entry_doc(f"e-{i:03d}", gloss, [variant_doc(f"v-{i:03d}", gloss, exemplars)])
        )
    return manifest_doc(entries, kpcount)


@pytest.fixture(scope="session")
def synthetic_bank():
    return import_bank(synthetic_gallery_doc())


@pytest.fixture(scope="session")
def synthetic_index(synthetic_bank):
    return build_index(synthetic_bank)


def write_manifest_tree(doc: dict, root: Path) -> Path:
    """Materialize an inline-features manifest as files on disk: one manifest
    plus one .features file per exemplar, paths relative to the manifest."""
    root.mkdir(parents=True, exist_ok=True)
    features_dir = root / "features"
    features_dir.mkdir(exist_ok=True)
    out = json.loads(json.dumps(doc))
    for entry in out["entries"]:
        for variant in entry["variants"]:
            for ex in variant["exemplars"]:
                rel = f"features/{ex['exemplar_id']}.features"
                (root / rel).write_text(
                    json.dumps(ex["features"], sort_keys=True, separators=(",", ":")) + "\n",
                    encoding="utf-8",
                )
                ex["features"] = rel
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps(out, indent=2, sort_keys=True), encoding="utf-8")
    return manifest_path
