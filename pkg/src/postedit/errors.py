"""Exception types shared across the package."""


class PosteditError(Exception):
    """Base class for all package-specific errors."""


class EmptyInput(PosteditError):
    """Raised when text to tokenize is empty or whitespace-only."""


class ParseFormatError(PosteditError):
    """Raised for malformed bracketed constituency trees."""


class EmptyCorpus(PosteditError):
    """Raised when a model is trained on an empty corpus."""


class ScorerUnavailable(PosteditError):
    """A scorer backend failed (e.g. remote server down).

    May carry a partial edit trace in ``trace`` when raised mid-search.
    """

    def __init__(self, message: str, trace=None, payload=None):
        super().__init__(message)
        self.trace = trace
        self.payload = payload


class NoKeywords(PosteditError):
    """The source explanation yields no RAKE keywords."""


class DegenerateEmbedding(PosteditError):
    """A sentence embedding has zero norm; cosine is undefined."""


class ProposalFailed(PosteditError):
    """An edit proposal could not be built; the step counts as rejected."""


class EmptySelection(PosteditError):
    """Sentence filtering removed every candidate sentence."""


class ProtocolError(PosteditError):
    """A remote response violated the wire schema.

    Carries the offending payload for diagnostics.
    """

    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


class DataError(PosteditError):
    """Dataset ingestion failed; message lists offending lines/fields."""


class UndefinedMetric(PosteditError):
    """A readability metric is undefined for the given text (no words)."""
