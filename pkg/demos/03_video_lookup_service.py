"""
The lookup service end to end
=============================

Upload a clip's features, review the top-5 candidates, confirm the right one,
and watch the confirmation-rank statistics update. The demo runs the real
FastAPI app in process with a test client; `signlookup serve --config ...`
runs the same app over the network.

Upload rules mirror the upload page: filenames restricted to letters, digits
and - _ . , formats .mp4/.mov (which need an extractor plug-in) or
pre-extracted .features, and at most 7 seconds of video. Upload bytes are
spooled, then purged before the response goes out - nothing is retained.
"""

import json
import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from signlookup.features import FeatureSequence, dumps_features, save_feature_file
from signlookup.service import ServiceConfig, build_state, create_app

rng = np.random.default_rng(3)
root = Path(tempfile.mkdtemp(prefix="lookup-demo-"))
(root / "bank" / "features").mkdir(parents=True)


def random_clip(frames: int, kpcount: int = 8) -> FeatureSequence:
    xy = np.cumsum(rng.normal(scale=0.1, size=(frames, kpcount, 2)), axis=0)
    conf = rng.uniform(0.7, 1.0, size=(frames, kpcount, 1))
    return FeatureSequence(np.concatenate([xy, conf], axis=2), fps=30.0)


# A five-sign gallery like the results screen: DANCE first when we query with
# a DANCE production.
glosses = ["DANCE", "IRON-CLOTHES", "STIR", "BAKING-SPRINKLES", "SAUCE"]
entries = []
clips = {}
for gloss in glosses:
    clip = random_clip(int(rng.integers(20, 32)))
    clips[gloss] = clip
    xid = f"x-{gloss.lower()}"
    save_feature_file(clip, root / "bank" / "features" / f"{xid}.features")
    entries.append(
        {
            "entry_id": f"e-{gloss.lower()}",
            "base_gloss": gloss,
            "sign_class": "lexical",
            "variants": [
                {
                    "variant_id": f"v-{gloss.lower()}",
                    "label": gloss,
                    "start_handshape_dom": "5",
                    "end_handshape_dom": "5",
                    "related_english_words": [gloss.lower().replace("-", " ")],
                    "exemplars": [
                        {
                            "exemplar_id": xid,
                            "provenance": "isolated",
                            "features": f"features/{xid}.features",
                        }
                    ],
                }
            ],
        }
    )

manifest_path = root / "bank" / "manifest.json"
manifest_path.write_text(
    json.dumps({"schema": "sign-bank-manifest/1", "kpcount": 8, "entries": entries}),
    encoding="utf-8",
)

config = ServiceConfig(
    manifest_path=str(manifest_path),
    spool_dir=str(root / "spool"),
    stats_log_path=str(root / "confirmations.jsonl"),
)
app = create_app(build_state(config))
client = TestClient(app)

# Submit a noisy DANCE production for recognition.
query = clips["DANCE"].data.copy()
query[:, :, :2] += rng.normal(scale=0.02, size=query[:, :, :2].shape)
payload = dumps_features(FeatureSequence(query, fps=30.0)).encode()

resp = client.post(
    "/api/recognize",
    files={"file": ("my_dance_take1.features", payload, "application/octet-stream")},
    data={"sign_type": "citation"},
)
body = resp.json()
print("top 5 matching signs:", ", ".join(c["base_gloss"] for c in body["candidates"]))

# Confirm the first candidate (its only variant); the response points at the
# sign-bank entry page.
first = body["candidates"][0]
confirm = client.post(
    f"/api/sessions/{body['token']}/confirm",
    json={"selection": {"rank": 1, "variant_id": first["variants"][0]["variant_id"]}},
).json()
print("confirmed:", confirm["state"], "->", confirm["redirect"]["url"])

# A second lookup where nothing matches: "none of those" routes back to search.
junk = dumps_features(random_clip(18)).encode()
resp = client.post(
    "/api/recognize",
    files={"file": ("unknown_sign.features", junk, "application/octet-stream")},
    data={"sign_type": "citation"},
)
none_confirm = client.post(
    f"/api/sessions/{resp.json()['token']}/confirm", json={"selection": "none"}
).json()
print("rejected:", none_confirm["state"], "->", none_confirm["redirect"]["url"])

# The statistics the project keeps to assess the success rate over time:
print("confirmation stats:", json.dumps(client.get("/api/stats").json()["citation"]))

# Privacy: the spool directory holds nothing once responses are out.
spooled = list(Path(config.spool_dir).iterdir())
print("files left in spool:", spooled)
