"""Corpus perturbations: keyboard typos, character swaps, synonym replacement.

Noise attacks (keyboard, swap) rewrite token text only and never touch
labels.  The synonym attack replaces whole gold entity spans and rewrites
the labels of the inserted phrase.  Every attack returns the perturbed
corpus together with an alignment record that maps original token ranges to
replacement token ranges; replaying the record on the original corpus
reproduces the perturbed corpus exactly.

Randomness is positional: each token draws from a generator seeded by a
hash of (seed, sentence index, token index), so output is byte-identical
for a given seed no matter how sentences are batched, ordered, or spread
across threads.
"""

from __future__ import annotations

import hashlib
import json
import random
import struct
from dataclasses import dataclass
from typing import Mapping

from .corpus import Corpus, Sentence, Token, extract_spans
from .errors import LayoutError, ShapeMismatchError
from .lexicon import Lexicon, lookup
from .selection import SelectionPolicy, select_targets, split_subwords

ATTACK_KINDS = ("keyboard", "swap", "synonym")

# hyphen sub-words shorter than this are never perturbed
SUBWORD_LENGTH_FLOOR = 3

_COPY = "copy"


@dataclass(frozen=True)
class KeyboardLayout:
    """Adjacency map of a keyboard: lowercase key to its neighbor string."""

    adjacency: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "adjacency", dict(self.adjacency))
        if not self.adjacency:
            raise ValueError("keyboard layout must map at least one key")
        for key, neighbors in self.adjacency.items():
            if len(key) != 1 or key != key.lower():
                raise ValueError(f"layout keys must be single lowercase characters: {key!r}")
            if not neighbors or neighbors != neighbors.lower():
                raise ValueError(f"neighbors of {key!r} must be a non-empty lowercase string")
            if key in neighbors:
                raise ValueError(f"{key!r} lists itself as a neighbor")

    def neighbors(self, char: str) -> str | None:
        """Neighbor string for a character (case-insensitive), or None."""
        return self.adjacency.get(char.lower())


def _build_qwerty() -> KeyboardLayout:
    # key centers in quarter-key units; the stagger makes diagonal pairs
    # like a/z and the digit row above i/o/p come out adjacent
    rows = ("1234567890", "qwertyuiop", "asdfghjkl", "zxcvbnm")
    offsets = (0, 2, 3, 5)
    position = {}
    for row, (keys, offset) in enumerate(zip(rows, offsets)):
        for col, ch in enumerate(keys):
            position[ch] = (row, offset + 4 * col)
    adjacency = {}
    for ch, (row, x) in position.items():
        near = [
            other
            for other, (orow, ox) in position.items()
            if other != ch
            and (
                (orow == row and abs(ox - x) == 4)
                or (abs(orow - row) == 1 and abs(ox - x) < 4)
            )
        ]
        adjacency[ch] = "".join(sorted(near))
    return KeyboardLayout(adjacency)


QWERTY = _build_qwerty()


def load_layout(text: str) -> KeyboardLayout:
    """Parse a layout override: a JSON object of key to neighbor string."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise LayoutError(f"layout is not valid JSON: {err}") from None
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise LayoutError("layout must be a JSON object mapping strings to strings")
    try:
        return KeyboardLayout(data)
    except ValueError as err:
        raise LayoutError(str(err)) from None


@dataclass(frozen=True)
class AttackConfig:
    """Everything an attack needs besides the corpus itself.

    ``policy`` drives target selection for keyboard and swap; ``layout``
    supplies keyboard adjacency (defaults to QWERTY); ``lexicon`` supplies
    synonym replacements.  ``seed`` is a 64-bit unsigned integer; the
    synonym attack is deterministic and ignores it.
    """

    kind: str
    seed: int = 0
    policy: SelectionPolicy | None = None
    layout: KeyboardLayout | None = None
    lexicon: Lexicon | None = None

    def __post_init__(self) -> None:
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"kind must be one of {ATTACK_KINDS}: {self.kind!r}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind in ("keyboard", "swap") and self.policy is None:
            raise ValueError(f"{self.kind} attack requires a selection policy")
        if self.kind == "keyboard" and self.layout is None:
            object.__setattr__(self, "layout", QWERTY)
        if self.kind == "synonym" and self.lexicon is None:
            raise ValueError("synonym attack requires a lexicon")


@dataclass(frozen=True)
class TokenEdit:
    """One aligned range: original tokens [source_start, source_end) map to
    perturbed tokens [target_start, target_end).  ``copy`` edits carry no
    replacement tokens; attack edits carry the tokens they inserted."""

    kind: str
    source_start: int
    source_end: int
    target_start: int
    target_end: int
    replacement: tuple[Token, ...] = ()

    def __post_init__(self) -> None:
        if self.kind != _COPY and self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown edit kind: {self.kind!r}")
        if self.source_start > self.source_end or self.target_start > self.target_end:
            raise ValueError("edit ranges must be non-decreasing")
        if self.kind == _COPY:
            if self.replacement:
                raise ValueError("copy edits carry no replacement tokens")
            if self.source_end - self.source_start != self.target_end - self.target_start:
                raise ValueError("copy edits must cover equal-length ranges")
        elif len(self.replacement) != self.target_end - self.target_start:
            raise ValueError("replacement length must match the target range")


@dataclass(frozen=True)
class SentenceAlignment:
    edits: tuple[TokenEdit, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edits", tuple(self.edits))
        src = tgt = 0
        for edit in self.edits:
            if edit.source_start != src or edit.target_start != tgt:
                raise ValueError("edits must be ordered and tile both sentences without gaps")
            src, tgt = edit.source_end, edit.target_end


@dataclass(frozen=True)
class AlignmentRecord:
    """Per-sentence edit lists produced alongside a perturbed corpus."""

    attack: str
    sentences: tuple[SentenceAlignment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.attack not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind: {self.attack!r}")

    def modified_source_tokens(self) -> int:
        """Original tokens covered by non-copy edits."""
        return sum(
            edit.source_end - edit.source_start
            for alignment in self.sentences
            for edit in alignment.edits
            if edit.kind != _COPY
        )

    def replay(self, original: Corpus) -> Corpus:
        """Apply the recorded edits to the original corpus."""
        if len(original.sentences) != len(self.sentences):
            raise ShapeMismatchError(
                f"alignment covers {len(self.sentences)} sentences, corpus has "
                f"{len(original.sentences)}"
            )
        rebuilt = []
        for si, (sentence, alignment) in enumerate(zip(original.sentences, self.sentences)):
            tokens: list[Token] = []
            consumed = 0
            for edit in alignment.edits:
                if edit.source_end > len(sentence):
                    raise ShapeMismatchError(f"sentence {si}: edit range exceeds sentence length")
                if edit.kind == _COPY:
                    tokens.extend(sentence.tokens[edit.source_start:edit.source_end])
                else:
                    tokens.extend(edit.replacement)
                consumed = edit.source_end
            if consumed != len(sentence):
                raise ShapeMismatchError(f"sentence {si}: edits do not cover the full sentence")
            rebuilt.append(Sentence(tuple(tokens)))
        return Corpus(tuple(rebuilt), name=original.name)

    def to_dict(self) -> dict:
        return {
            "attack": self.attack,
            "sentences": [
                {
                    "edits": [
                        _edit_to_dict(edit) for edit in alignment.edits
                    ]
                }
                for alignment in self.sentences
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlignmentRecord":
        sentences = tuple(
            SentenceAlignment(tuple(_edit_from_dict(e) for e in entry["edits"]))
            for entry in data["sentences"]
        )
        return cls(data["attack"], sentences)


def _edit_to_dict(edit: TokenEdit) -> dict:
    out = {
        "kind": edit.kind,
        "source": [edit.source_start, edit.source_end],
        "target": [edit.target_start, edit.target_end],
    }
    if edit.kind != _COPY:
        out["replacement"] = [{"text": t.text, "label": t.label} for t in edit.replacement]
    return out


def _edit_from_dict(data: dict) -> TokenEdit:
    return TokenEdit(
        kind=data["kind"],
        source_start=data["source"][0],
        source_end=data["source"][1],
        target_start=data["target"][0],
        target_end=data["target"][1],
        replacement=tuple(Token(t["text"], t["label"]) for t in data.get("replacement", ())),
    )


def _token_rng(seed: int, sentence_index: int, token_index: int) -> random.Random:
    # fixed splittable derivation: perturbing token (si, ti) never depends
    # on what happened to any other token
    digest = hashlib.blake2b(
        struct.pack("<QQQ", seed, sentence_index, token_index), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "little"))


def keyboard_perturb_word(word: str, layout: KeyboardLayout, rng: random.Random) -> str:
    """Replace one character per eligible hyphen sub-word with a keyboard
    neighbor, preserving case.  A sub-word is eligible when it has at least
    SUBWORD_LENGTH_FLOOR characters and at least one character present in
    the layout; everything else is left alone."""
    chars = list(word)
    for segment, offset in split_subwords(word):
        if len(segment) < SUBWORD_LENGTH_FLOOR:
            continue
        covered = [i for i, ch in enumerate(segment) if layout.neighbors(ch)]
        if not covered:
            continue
        pos = covered[rng.randrange(len(covered))]
        original = segment[pos]
        options = layout.neighbors(original)
        replacement = options[rng.randrange(len(options))]
        if original.isupper() and len(replacement.upper()) == 1:
            replacement = replacement.upper()
        chars[offset + pos] = replacement
    return "".join(chars)


def swap_perturb_word(word: str, rng: random.Random) -> str:
    """Transpose one adjacent pair of differing characters per eligible
    hyphen sub-word; sub-words below the length floor or with no differing
    adjacent pair (e.g. ``aaa``) are left alone."""
    chars = list(word)
    for segment, offset in split_subwords(word):
        if len(segment) < SUBWORD_LENGTH_FLOOR:
            continue
        pairs = [i for i in range(len(segment) - 1) if segment[i] != segment[i + 1]]
        if not pairs:
            continue
        i = offset + pairs[rng.randrange(len(pairs))]
        chars[i], chars[i + 1] = chars[i + 1], chars[i]
    return "".join(chars)


def _runs_to_alignment(kind: str, length: int, changed: dict[int, Token]) -> SentenceAlignment:
    edits: list[TokenEdit] = []
    copy_start = None
    for i in range(length + 1):
        if i < length and i not in changed:
            if copy_start is None:
                copy_start = i
            continue
        if copy_start is not None:
            edits.append(TokenEdit(_COPY, copy_start, i, copy_start, i))
            copy_start = None
        if i < length:
            edits.append(TokenEdit(kind, i, i + 1, i, i + 1, (changed[i],)))
    return SentenceAlignment(tuple(edits))


def apply_noise_attack(corpus: Corpus, config: AttackConfig) -> tuple[Corpus, AlignmentRecord]:
    """Apply the keyboard or swap attack to every selected token.

    Token and sentence counts are preserved and labels are untouched.
    Selected tokens that the word-level operation cannot change (no eligible
    sub-word) pass through unchanged and are recorded as copies.
    """
    if config.kind not in ("keyboard", "swap"):
        raise ValueError(f"not a noise attack: {config.kind!r}")
    out_sentences = []
    alignments = []
    for si, sentence in enumerate(corpus.sentences):
        targets = select_targets(sentence, config.policy)
        tokens = list(sentence.tokens)
        changed: dict[int, Token] = {}
        for ti in sorted(targets):
            rng = _token_rng(config.seed, si, ti)
            old = tokens[ti]
            if config.kind == "keyboard":
                new_text = keyboard_perturb_word(old.text, config.layout, rng)
            else:
                new_text = swap_perturb_word(old.text, rng)
            if new_text != old.text:
                tokens[ti] = Token(new_text, old.label)
                changed[ti] = tokens[ti]
        out_sentences.append(Sentence(tuple(tokens)))
        alignments.append(_runs_to_alignment(config.kind, len(sentence), changed))
    perturbed = Corpus(tuple(out_sentences), name=corpus.name)
    return perturbed, AlignmentRecord(config.kind, tuple(alignments))


def apply_synonym_attack(corpus: Corpus, config: AttackConfig) -> tuple[Corpus, AlignmentRecord]:
    """Replace gold entity spans whose surface form has a lexicon entry.

    The surface form is the span's tokens joined by single spaces and
    normalized like lexicon keys.  A hit replaces the span's tokens with the
    whitespace-tokenized synonym labeled ``B-TYPE I-TYPE ...``; a miss
    leaves the span untouched.  Replacements are never re-examined, non
    entity tokens are never modified, and the output is strict-valid
    whenever the input is.
    """
    if config.kind != "synonym":
        raise ValueError(f"not the synonym attack: {config.kind!r}")
    out_sentences = []
    alignments = []
    for si, sentence in enumerate(corpus.sentences):
        spans = extract_spans(sentence, mode="strict", sentence_index=si)
        tokens: list[Token] = []
        edits: list[TokenEdit] = []
        cursor = 0

        def copy_through(end: int) -> None:
            nonlocal cursor
            if end > cursor:
                shift = len(tokens) - cursor
                tokens.extend(sentence.tokens[cursor:end])
                edits.append(TokenEdit(_COPY, cursor, end, cursor + shift, end + shift))
                cursor = end

        for span in spans:
            surface = " ".join(tok.text for tok in sentence.tokens[span.start:span.end])
            replacement = lookup(config.lexicon, surface)
            if replacement is None:
                continue
            copy_through(span.start)
            words = replacement.split()
            labels = [f"B-{span.entity_type}"] + [f"I-{span.entity_type}"] * (len(words) - 1)
            new_tokens = tuple(Token(w, l) for w, l in zip(words, labels))
            target_start = len(tokens)
            tokens.extend(new_tokens)
            edits.append(
                TokenEdit(
                    "synonym",
                    span.start,
                    span.end,
                    target_start,
                    target_start + len(new_tokens),
                    new_tokens,
                )
            )
            cursor = span.end
        copy_through(len(sentence))
        out_sentences.append(Sentence(tuple(tokens)))
        alignments.append(SentenceAlignment(tuple(edits)))
    perturbed = Corpus(tuple(out_sentences), name=corpus.name)
    return perturbed, AlignmentRecord("synonym", tuple(alignments))


def apply_attack(corpus: Corpus, config: AttackConfig) -> tuple[Corpus, AlignmentRecord]:
    """Dispatch on the config's kind."""
    if config.kind == "synonym":
        return apply_synonym_attack(corpus, config)
    return apply_noise_attack(corpus, config)
