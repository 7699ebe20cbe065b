"""Exception hierarchy shared across the pipeline.

The CLI maps these onto exit codes: config problems exit 1, missing
upstream artifacts exit 2, numerical failures exit 3.
"""


class RescapError(Exception):
    """Base class for all package errors."""


class ConfigError(RescapError):
    """Invalid run configuration (bad field values, missing paths)."""


class MissingArtifactError(RescapError):
    """A required upstream artifact does not exist."""

    def __init__(self, path):
        self.path = path
        super().__init__(f"missing upstream artifact: {path}")


class NumericalError(RescapError):
    """A numerical procedure could not complete."""


class ParseError(RescapError):
    """A corpus line could not be parsed as JSON."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class EmptyCorpusError(RescapError):
    """No admissible records in the input."""


class EmptyVocabularyError(RescapError):
    """Every term was removed by the vocabulary filters."""


class KdeDegenerateError(NumericalError):
    """Too few distinct usage values to estimate a density."""


class RankDeficientError(NumericalError):
    """Design matrix is rank deficient."""

    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"rank-deficient design; collinear columns: {self.columns}")
