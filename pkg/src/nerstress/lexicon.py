"""Synonym lexicon: tab-separated surface-to-replacement pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import LexiconError


def normalize_surface(surface: str) -> str:
    """Lowercase and collapse internal whitespace to single spaces."""
    return " ".join(surface.lower().split())


@dataclass(frozen=True)
class Lexicon:
    """Normalized surface forms mapped to replacement phrases.

    Keys are normalized with :func:`normalize_surface`; replacements keep
    their case and are whitespace-tokenizable.
    """

    entries: Mapping[str, str]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        for surface, replacement in self.entries.items():
            if surface != normalize_surface(surface):
                raise ValueError(f"lexicon key is not normalized: {surface!r}")
            if not replacement.strip():
                raise ValueError(f"empty replacement for {surface!r}")
            if normalize_surface(replacement) == surface:
                raise ValueError(f"entry maps {surface!r} to itself")

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(text: str) -> Lexicon:
    """Parse lexicon text: ``surface<TAB>synonym`` lines, ``#`` comments.

    Duplicate surfaces are allowed; the last entry wins and a warning is
    recorded on the returned lexicon.  Missing tabs, empty synonyms, and
    self-mappings are errors with line numbers.
    """
    entries: dict[str, str] = {}
    warnings: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconError("expected tab-separated surface and synonym", lineno)
        surface_field, replacement_field = line.split("\t", 1)
        surface = normalize_surface(surface_field)
        replacement = " ".join(replacement_field.split())
        if not surface:
            raise LexiconError("empty surface form", lineno)
        if not replacement:
            raise LexiconError(f"empty synonym for {surface!r}", lineno)
        if normalize_surface(replacement) == surface:
            raise LexiconError(f"entry maps {surface!r} to itself", lineno)
        if surface in entries:
            warnings.append(f"line {lineno}: duplicate surface {surface!r} overrides earlier entry")
        entries[surface] = replacement
    return Lexicon(entries, tuple(warnings))


def dump_lexicon(lexicon: Lexicon) -> str:
    """Render a lexicon as sorted tab-separated lines; loads back unchanged."""
    lines = [f"{surface}\t{replacement}" for surface, replacement in sorted(lexicon.entries.items())]
    return "".join(line + "\n" for line in lines)


def lookup(lexicon: Lexicon, surface: str) -> str | None:
    """Replacement for the surface form, or None when no entry matches."""
    return lexicon.entries.get(normalize_surface(surface))
