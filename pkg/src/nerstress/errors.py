"""Exception types shared across the package."""

from __future__ import annotations


class NerstressError(Exception):
    """Base class for every error this package raises on bad input data."""


class ParseError(NerstressError):
    """A CoNLL document could not be parsed.

    ``line`` is the 1-based line number of the offending input line.
    """

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(NerstressError):
    """A corpus violates the strict IOB2 transition rules.

    ``locations`` lists every offending position as ``(sentence_index,
    token_index)`` pairs, both 0-based.
    """

    def __init__(self, message: str, locations: list[tuple[int, int]] | tuple[tuple[int, int], ...] = ()):
        self.locations = tuple(locations)
        if self.locations:
            where = ", ".join(f"(sentence {s}, token {t})" for s, t in self.locations)
            message = f"{message}: {where}"
        super().__init__(message)


class LexiconError(NerstressError):
    """A synonym lexicon file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LayoutError(NerstressError):
    """A keyboard layout file is malformed."""


class ShapeMismatchError(NerstressError):
    """Two corpora that must align token-for-token do not."""


class EvaluationError(NerstressError):
    """An evaluation quantity is undefined for the given inputs."""


class ManifestError(NerstressError):
    """An experiment manifest is invalid."""
