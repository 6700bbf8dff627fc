"""Look up a sign from a pose-feature video example.

The pipeline: `intake` validates uploads and guarantees deletion of their
bytes, `matcher` ranks the closest signs in the gallery with banded DTW over
normalized keypoint sequences, `signbank` holds the lexical database the
candidates link into, `sessions`/`service` run the confirmation loop and its
statistics, and `annotation` inserts confirmed sign properties into
annotation documents.
"""

from .errors import SignLookupError
from .features import FeatureSequence, load_feature_file, save_feature_file
from .matcher import (
    CandidateList,
    DtwRecognizer,
    QueryMode,
    Recognizer,
    build_index,
    dtw,
    frame_distance,
    normalize,
    rank,
)
from .signbank import Bank, SearchQuery, import_bank

__all__ = [
    "Bank",
    "CandidateList",
    "DtwRecognizer",
    "FeatureSequence",
    "QueryMode",
    "Recognizer",
    "SearchQuery",
    "SignLookupError",
    "build_index",
    "dtw",
    "frame_distance",
    "import_bank",
    "load_feature_file",
    "normalize",
    "rank",
    "save_feature_file",
]

__version__ = "0.1.0"
