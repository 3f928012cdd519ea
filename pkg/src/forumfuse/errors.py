"""Exception hierarchy shared across the package.

Every error raised by forumfuse derives from :class:`ForumFuseError`, so
callers (CLI, HTTP layer) can distinguish domain failures from bugs.
"""


class ForumFuseError(Exception):
    """Base class for all forumfuse errors."""


class ValidationError(ForumFuseError):
    """An input value violates a documented invariant."""


class SchemaError(ValidationError):
    """A file or payload does not match its declared schema (e.g. missing column)."""


class SplitInfeasibleError(ForumFuseError):
    """The requested split configuration cannot be built from the given corpus."""


class EmptyEnsembleError(ValidationError):
    """Fusion was invoked with zero score blocks."""


class TrainingError(ForumFuseError):
    """Training a local model failed; the message names the offending dimension."""


class ProviderError(ForumFuseError):
    """A score provider could not produce a ScoreBlock."""


class ProviderUnavailableError(ProviderError):
    """The provider's backend is unreachable after retries."""


class ScoringError(ProviderError):
    """A provider response could not be turned into valid scores.

    Carries the raw response text for audit.
    """

    def __init__(self, message: str, raw_response: str = ""):
        super().__init__(message)
        self.raw_response = raw_response


class ConflictError(ForumFuseError):
    """A state transition conflicts with existing state (e.g. double resolution)."""


class NotFoundError(ForumFuseError):
    """A referenced entity does not exist."""
