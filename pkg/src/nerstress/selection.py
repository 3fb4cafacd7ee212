"""Policies that pick which tokens of a sentence a noise attack may touch."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Sentence

POLICY_KINDS = ("entity_only", "vocabulary", "content_words", "union")


def split_subwords(text: str) -> list[tuple[str, int]]:
    """Hyphen-separated segments of a token with their character offsets.

    Only ``-`` splits; the hyphens themselves belong to no segment and empty
    segments are dropped, so ``"alpha-tocopherol"`` gives
    ``[("alpha", 0), ("tocopherol", 6)]`` and ``"-a-"`` gives ``[("a", 1)]``.
    """
    segments = []
    start = 0
    for i, ch in enumerate(text):
        if ch == "-":
            if i > start:
                segments.append((text[start:i], start))
            start = i + 1
    if len(text) > start:
        segments.append((text[start:], start))
    return segments


@dataclass(frozen=True)
class SelectionPolicy:
    """Which tokens are eligible perturbation targets.

    kind:
        ``entity_only``    tokens with a non-O label
        ``vocabulary``     tokens whose lowercased text, or any hyphen
                           sub-word of it, is in ``vocabulary``
        ``content_words``  tokens with at least ``min_word_length``
                           alphabetic characters
        ``union``          entity_only plus vocabulary
    Regardless of kind, tokens without alphabetic characters are never
    selected, and a selected token always has at least one hyphen sub-word
    of ``min_word_length`` characters or more.
    """

    kind: str = "union"
    vocabulary: frozenset[str] | None = None
    min_word_length: int = 3

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"kind must be one of {POLICY_KINDS}: {self.kind!r}")
        needs_vocab = self.kind in ("vocabulary", "union")
        if needs_vocab and self.vocabulary is None:
            raise ValueError(f"policy kind {self.kind!r} requires a vocabulary")
        if not needs_vocab and self.vocabulary is not None:
            raise ValueError(f"policy kind {self.kind!r} does not take a vocabulary")
        if self.vocabulary is not None:
            object.__setattr__(self, "vocabulary", frozenset(self.vocabulary))
        if self.min_word_length < 1:
            raise ValueError("min_word_length must be at least 1")


def load_vocabulary(text: str) -> frozenset[str]:
    """Read a vocabulary file: one term per line, lowercased, blanks skipped."""
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def _perturbable(text: str, min_word_length: int) -> bool:
    # pure punctuation/digit tokens are never targets, and at least one
    # hyphen sub-word must be long enough to perturb
    if not any(ch.isalpha() for ch in text):
        return False
    return any(len(seg) >= min_word_length for seg, _ in split_subwords(text))


def _vocabulary_hit(text: str, vocabulary: frozenset[str]) -> bool:
    lowered = text.lower()
    if lowered in vocabulary:
        return True
    return any(seg.lower() in vocabulary for seg, _ in split_subwords(text))


def select_targets(sentence: Sentence, policy: SelectionPolicy) -> set[int]:
    """Indices of the sentence's tokens that the policy selects.

    Pure function of its arguments; attacks derive all randomness elsewhere.
    """
    selected = set()
    for i, tok in enumerate(sentence.tokens):
        if not _perturbable(tok.text, policy.min_word_length):
            continue
        if policy.kind == "entity_only":
            hit = tok.label != "O"
        elif policy.kind == "vocabulary":
            hit = _vocabulary_hit(tok.text, policy.vocabulary)
        elif policy.kind == "content_words":
            hit = sum(ch.isalpha() for ch in tok.text) >= policy.min_word_length
        else:
            hit = tok.label != "O" or _vocabulary_hit(tok.text, policy.vocabulary)
        if hit:
            selected.add(i)
    return selected
