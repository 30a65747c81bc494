"""Error types shared across the toolkit.

Every error carries a stable machine-readable ``code`` so CLI output and
service responses can surface failures without string matching on messages.
"""

from __future__ import annotations


class ReconScoreError(Exception):
    """Base class; ``code`` is a stable identifier like ``"token-limit"``."""

    code = "error"

    def __init__(self, message: str = "", *, code: str | None = None):
        if code is not None:
            self.code = code
        super().__init__(message or self.code)


class MetricInputError(ReconScoreError):
    code = "metric-input"


class IdfDegenerateError(ReconScoreError):
    code = "idf-degenerate"


class ZeroVarianceError(ReconScoreError):
    code = "zero-variance"


class MissingScoreError(ReconScoreError):
    code = "missing-score"


class EmptyCaptionError(ReconScoreError):
    code = "empty-caption"


class EmptyGenerationError(ReconScoreError):
    code = "empty-generation"


class TokenLimitError(ReconScoreError):
    code = "token-limit"

    def __init__(self, message: str = "", *, limit: int | None = None):
        self.limit = limit
        super().__init__(message)


class EmptyInputError(ReconScoreError):
    code = "empty-input"


class DimMismatchError(ReconScoreError):
    code = "dim-mismatch"


class NotNormalizedError(ReconScoreError):
    code = "embedding-not-normalized"


class TransportError(ReconScoreError):
    """Retryable wire failure."""

    code = "transport"


class NoCandidatesError(ReconScoreError):
    code = "no-candidates"


class DatasetError(ReconScoreError):
    code = "dataset"
