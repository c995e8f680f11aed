"""Exception hierarchy shared across the package.

Every domain failure raises a subclass of :class:`TempoTopicsError`, so the
CLI and the HTTP service can map errors uniformly (exit code 1 / 4xx-5xx).
"""


class TempoTopicsError(Exception):
    """Base class for all domain errors."""

    code = "error"


class EmptyCorpus(TempoTopicsError):
    """Preprocessing dropped every document."""

    code = "empty_corpus"


class DuplicateId(TempoTopicsError):
    """Two raw documents share the same id."""

    code = "duplicate_id"


class ShapeMismatch(TempoTopicsError):
    """Declared tensor dimensions do not match the stored element count."""

    code = "shape_mismatch"


class NotADistribution(TempoTopicsError):
    """A topic-word row has negative entries or does not sum to one."""

    code = "not_a_distribution"


class VocabMismatch(TempoTopicsError):
    """Tensor vocabulary axis does not match the vocabulary file."""

    code = "vocab_mismatch"


class TimestampMismatch(TempoTopicsError):
    """Tensor time axis does not match the timestamps file."""

    code = "timestamp_mismatch"


class IndexOutOfRange(TempoTopicsError):
    """Topic, time, or term index outside the tensor bounds."""

    code = "index_out_of_range"


class UnknownTerm(TempoTopicsError):
    """A requested term is not part of the vocabulary."""

    code = "unknown_term"


class UndefinedTerm(TempoTopicsError):
    """A term has zero document frequency, so NPMI is undefined for it."""

    code = "undefined_term"


class ProviderError(TempoTopicsError):
    """LLM provider call failed (transport, HTTP status, or timeout)."""

    code = "llm_error"

    def __init__(self, message, status=None, timeout=False):
        super().__init__(message)
        self.status = status
        self.timeout = timeout
        if timeout:
            self.code = "llm_timeout"
        elif status is not None:
            self.code = f"llm_http_{status}"


class EmptyResponse(TempoTopicsError):
    """LLM provider returned an empty or whitespace-only completion."""

    code = "llm_empty_response"


class ContextOverflow(TempoTopicsError):
    """A single context document exceeds the total prompt budget."""

    code = "context_overflow"


class StartupValidation(TempoTopicsError):
    """A service artifact is missing or invalid at startup."""

    code = "startup_validation"
