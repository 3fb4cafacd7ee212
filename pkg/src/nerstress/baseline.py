"""Gazetteer baseline: memorize gold surface forms, tag by longest match."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .corpus import Corpus, Sentence, Token, corpus_spans


@dataclass(frozen=True)
class Gazetteer:
    """Case-folded token sequences mapped to entity types."""

    entries: Mapping[tuple[str, ...], str]
    max_len: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))
        for key in self.entries:
            if not key:
                raise ValueError("gazetteer keys must be non-empty token sequences")
        expected = max((len(k) for k in self.entries), default=0)
        if self.max_len != expected:
            raise ValueError(f"max_len must be {expected} for these entries")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: tuple[str, ...]) -> bool:
        return key in self.entries


def train_gazetteer(train: Corpus) -> Gazetteer:
    """Collect every gold span surface; when a surface carries more than one
    type, the most frequent wins and ties go to the earliest occurrence."""
    counts: Counter[tuple[tuple[str, ...], str]] = Counter()
    first_seen: dict[tuple[tuple[str, ...], str], int] = {}
    surfaces: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()
    for order, span in enumerate(corpus_spans(train, mode="strict")):
        sentence = train.sentences[span.sentence_index]
        key = tuple(tok.text.casefold() for tok in sentence.tokens[span.start:span.end])
        counts[(key, span.entity_type)] += 1
        first_seen.setdefault((key, span.entity_type), order)
        if key not in seen:
            seen.add(key)
            surfaces.append(key)
    entries = {}
    for key in surfaces:
        candidates = [t for (k, t) in counts if k == key]
        winner = min(candidates, key=lambda t: (-counts[(key, t)], first_seen[(key, t)]))
        entries[key] = winner
    max_len = max((len(k) for k in entries), default=0)
    return Gazetteer(entries, max_len)


def tag(gazetteer: Gazetteer, corpus: Corpus) -> Corpus:
    """Label a corpus by leftmost-longest gazetteer matching.

    Matching is case-insensitive; unmatched tokens get ``O``.  The output is
    always valid strict IOB2.
    """
    tagged = []
    for sentence in corpus.sentences:
        folded = [tok.text.casefold() for tok in sentence.tokens]
        labels = ["O"] * len(folded)
        i = 0
        while i < len(folded):
            matched = False
            for length in range(min(gazetteer.max_len, len(folded) - i), 0, -1):
                key = tuple(folded[i : i + length])
                if key in gazetteer.entries:
                    entity_type = gazetteer.entries[key]
                    labels[i] = f"B-{entity_type}"
                    for j in range(i + 1, i + length):
                        labels[j] = f"I-{entity_type}"
                    i += length
                    matched = True
                    break
            if not matched:
                i += 1
        tagged.append(
            Sentence(tuple(Token(tok.text, lab) for tok, lab in zip(sentence.tokens, labels)))
        )
    return Corpus(tuple(tagged), name=corpus.name)


def dump_gazetteer(gazetteer: Gazetteer) -> str:
    """Render entries as ``token sequence<TAB>type`` lines, sorted."""
    lines = [f"{' '.join(key)}\t{t}" for key, t in sorted(gazetteer.entries.items())]
    return "".join(line + "\n" for line in lines)


def load_gazetteer(text: str) -> Gazetteer:
    """Parse the dump format back into a gazetteer."""
    entries = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        surface, entity_type = line.split("\t", 1)
        entries[tuple(surface.casefold().split())] = entity_type.strip()
    return Gazetteer(entries, max((len(k) for k in entries), default=0))
