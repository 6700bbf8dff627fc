"""
Sequence matching with banded DTW
=================================

The matcher canonicalizes each clip (translate the reference keypoint to the
origin, divide by the RMS coordinate magnitude of confident keypoints), then
aligns clips with dynamic time warping under a Sakoe-Chiba band. This demo
shows the pieces one at a time.
"""

import numpy as np

from signlookup.features import FeatureSequence
from signlookup.matcher import default_band, dtw, frame_distance, normalize

rng = np.random.default_rng(2)

# --- frame distance: confidence-weighted Euclidean -------------------------
a = np.array([[0.0, 0.0, 1.0], [1.0, 1.0, 1.0]])
b = np.array([[3.0, 4.0, 1.0], [1.0, 1.0, 0.0]])
# the second keypoint has zero confidence on one side, so only the 3-4-5
# keypoint contributes:
print("frame distance:", frame_distance(a, b))

# --- normalization: translation and scale invariance ------------------------
clip = FeatureSequence(
    np.concatenate(
        [
            np.cumsum(rng.normal(scale=0.1, size=(20, 6, 2)), axis=0),
            np.ones((20, 6, 1)),
        ],
        axis=2,
    ),
    fps=30.0,
)
moved = clip.data.copy()
moved[:, :, :2] = moved[:, :, :2] * 2.0 + 5.0  # a bigger signer, off-center
print(
    "normalized difference after x2 scale and +5 translate:",
    float(np.abs(normalize(clip).data - normalize(FeatureSequence(moved)).data).max()),
)

# --- DTW: alignment absorbs tempo differences -------------------------------
slow = FeatureSequence(np.repeat(clip.data, 2, axis=0), fps=30.0)  # half speed
same = dtw(normalize(clip), normalize(clip))
warped = dtw(normalize(clip), normalize(slow))
print(f"dtw(clip, clip):      distance={same.distance:.6f}  path_len={same.path_len}")
print(f"dtw(clip, half-speed): distance={warped.distance:.6f}  path_len={warped.path_len}")

# --- the band bounds how far alignment may drift ----------------------------
other = FeatureSequence(
    np.concatenate(
        [
            np.cumsum(rng.normal(scale=0.1, size=(26, 6, 2)), axis=0),
            np.ones((26, 6, 1)),
        ],
        axis=2,
    ),
    fps=30.0,
)
m, n = len(clip), len(other)
band = default_band(m, n)
print(f"default band for lengths {m} vs {n}: {band}")
print("banded distance:  ", dtw(normalize(clip), normalize(other), band=band).distance)
print("unbanded distance:", dtw(normalize(clip), normalize(other)).distance)
