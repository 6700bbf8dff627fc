"""Exception types shared across the package."""


class SignLookupError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SignLookupError):
    """A structured-text document (feature file, manifest, annotation doc) is malformed."""


class BankImportError(SignLookupError):
    """A bank manifest violates an import invariant.

    `reason` is one of:
      - "duplicate": base gloss or variant label collides
      - "class": excluded sign class (fingerspelled, classifier, index, gesture, ...)
      - "reference": dangling reference (feature file, handshape label, source utterance)
      - "structure": malformed or invariant-violating shape (empty variant list, mixed
        keypoint counts, missing field)
    """

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


class QueryError(SignLookupError):
    """A search query carries no criteria."""


class NotFound(SignLookupError):
    """A referenced entry, variant, exemplar, utterance, or session does not exist."""


class InvalidInput(SignLookupError):
    """A matcher input violates its precondition (empty sequence, mismatched K, bad band)."""


class EmptyGallery(SignLookupError):
    """Recognition was requested against an index with no exemplars."""


class RecognitionError(SignLookupError):
    """A recognizer implementation failed; wraps the underlying cause."""


class ExtractorUnavailable(SignLookupError):
    """A raw-video upload arrived but no feature extractor plug-in is configured."""


class PurgeError(SignLookupError):
    """Spooled upload bytes could not be deleted; the path is queued for retry."""


class SessionConflict(SignLookupError):
    """The session already reached a terminal state; confirmations are one-shot."""


class SessionExpired(SignLookupError):
    """The session outlived its TTL before a confirmation arrived."""


class SelectionError(SignLookupError):
    """A confirmation named a rank/variant pair that is not in the candidate list."""


class RangeError(SignLookupError):
    """A frame range is out of bounds or too short to look up."""


class Overlap(SignLookupError):
    """A new sign token would overlap an existing one in the utterance."""


class ManifestError(SignLookupError):
    """An evaluation queries manifest is unusable (e.g. a query without a true label)."""


class ArtifactError(SignLookupError):
    """An ingest artifact has the wrong schema version or is unreadable."""
