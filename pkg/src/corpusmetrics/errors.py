"""Shared exception types.

``ConfigError`` maps to CLI exit code 2, ``DataError`` (and subclasses)
to exit code 3.
"""


class ConfigError(Exception):
    """Bad configuration: unreadable config file, invalid flag values."""


class DataError(Exception):
    """Invalid or missing input data."""


class CorpusFormatError(DataError):
    """Malformed corpus or registry file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmbeddingFormatError(DataError):
    """Malformed embedding file."""


class MissingArtifactError(DataError):
    """A pipeline stage requires an artifact that has not been produced yet."""
