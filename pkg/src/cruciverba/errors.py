"""Exception hierarchy shared across the pipeline.

Every error carries a machine-readable ``code`` (its class name) that the CLI
uses as exit reason and the HTTP API embeds in error payloads.
"""


class CruciverbaError(Exception):
    """Base class for all pipeline errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- article ingestion ---

class NotFound(CruciverbaError):
    """Requested page or resource does not exist."""


class NetworkError(CruciverbaError):
    """Transport failure that survived the retry budget."""


class RateLimited(CruciverbaError):
    """HTTP 429 persisted across all retry attempts."""


class ParseFailure(CruciverbaError):
    """HTML could not be parsed."""


# --- prompt rendering / response parsing ---

class EmptyContext(CruciverbaError):
    """Prompt rendering requires a non-empty context."""


class InvalidKeyword(CruciverbaError):
    """Keyword does not satisfy the curation keyword predicate."""


class MissingPlaceholder(CruciverbaError):
    """A prompt template is missing one of its required placeholders."""


class UnparseableResponse(CruciverbaError):
    """No clue lines could be extracted from a model response."""


# --- LLM gateway ---

class AuthFailure(CruciverbaError):
    """Endpoint rejected the credentials; never retried."""


class Timeout(CruciverbaError):
    """Request exceeded the configured timeout."""


class MalformedResponse(CruciverbaError):
    """Endpoint answered with a body the client cannot interpret."""


class ReplayMiss(CruciverbaError):
    """Replay mode found no recorded fixture for the request."""


# --- metrics ---

class EmptyCorpus(CruciverbaError):
    """Corpus scoring needs at least one pair."""


class KeyMismatch(CruciverbaError):
    """Compared clue sets are not keyed by the same context ids."""


# --- dataset store ---

class DuplicateRecord(CruciverbaError):
    """A record with the same (context, keyword, style, clue) already exists."""


class InvariantViolation(CruciverbaError):
    """Record fields violate the documented invariants."""


class SchemaError(CruciverbaError):
    """An imported line does not match the record schema."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptySet(CruciverbaError):
    """Statistics require at least one record."""


# --- grid construction ---

class EmptyAfterNormalization(CruciverbaError):
    """Answer normalization produced no grid letters."""


class NoPlacement(CruciverbaError):
    """Not even a single entry fits within the configured grid bounds."""


class InvalidLayout(CruciverbaError):
    """Layout failed validation and cannot be rendered."""
