"""CoNLL-style corpus model: parsing, IOB2 validation, serialization, spans.

The on-disk format is the usual column layout: one token per line, blank
lines between sentences.  The first whitespace-separated field of a line is
the token text and the last field is its IOB2 label; any columns in between
(POS tags, chunk tags, ...) are ignored on input.  Serialization always
emits the canonical two-column form with a single tab separator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ParseError, ShapeMismatchError, ValidationError

_LABEL_RE = re.compile(r"^(?:O|[BI]-\S+)$")

SPAN_MODES = ("strict", "lenient")


@dataclass(frozen=True)
class Token:
    """A surface form paired with its IOB2 label.

    ``text`` must be non-empty and free of whitespace; ``label`` is ``"O"``
    or ``"B-TYPE"`` / ``"I-TYPE"`` with a non-empty type name.
    """

    text: str
    label: str

    def __post_init__(self) -> None:
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"token text must be non-empty without whitespace: {self.text!r}")
        if not _LABEL_RE.match(self.label):
            raise ValueError(f"invalid IOB2 label: {self.label!r}")

    @property
    def entity_type(self) -> str | None:
        """The label's type name, or None for ``O``."""
        return None if self.label == "O" else self.label[2:]


@dataclass(frozen=True)
class Sentence:
    """An ordered, non-empty sequence of tokens."""

    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("a sentence must contain at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(tok.text for tok in self.tokens)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(tok.label for tok in self.tokens)


@dataclass(frozen=True)
class Corpus:
    """A named sequence of sentences.

    ``name`` is carried for bookkeeping only and is excluded from equality,
    so a serialization round trip compares equal regardless of the name
    given at parse time.
    """

    sentences: tuple[Sentence, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(sent) for sent in self.sentences)

    @property
    def annotated_sentence_count(self) -> int:
        """Number of sentences carrying at least one non-O label."""
        return sum(1 for sent in self.sentences if any(tok.label != "O" for tok in sent))


@dataclass(frozen=True)
class Span:
    """A labeled entity mention: tokens ``start`` (inclusive) to ``end`` (exclusive)."""

    entity_type: str
    start: int
    end: int
    sentence_index: int = 0

    def __post_init__(self) -> None:
        if not self.entity_type:
            raise ValueError("span entity type must be non-empty")
        if not (0 <= self.start < self.end):
            raise ValueError(f"span bounds must satisfy 0 <= start < end: ({self.start}, {self.end})")


@dataclass(frozen=True)
class StatsReport:
    """Corpus-pair summary: counts plus the fraction of tokens rewritten."""

    sentence_count: int
    annotated_sentence_count: int
    token_count: int
    modified_token_percentage: float

    def to_dict(self) -> dict:
        return {
            "sentence_count": self.sentence_count,
            "annotated_sentence_count": self.annotated_sentence_count,
            "token_count": self.token_count,
            "modified_token_percentage": self.modified_token_percentage,
        }


def iob2_violations(sentence: Sentence) -> list[int]:
    """Token indices whose I- label does not continue a same-type span."""
    bad = []
    for i, tok in enumerate(sentence.tokens):
        if not tok.label.startswith("I-"):
            continue
        if i == 0:
            bad.append(i)
            continue
        prev = sentence.tokens[i - 1].label
        if prev not in (f"B-{tok.entity_type}", f"I-{tok.entity_type}"):
            bad.append(i)
    return bad


def validate_corpus(corpus: Corpus) -> None:
    """Raise ValidationError listing every strict IOB2 violation in the corpus."""
    locations = [
        (si, ti)
        for si, sentence in enumerate(corpus.sentences)
        for ti in iob2_violations(sentence)
    ]
    if locations:
        raise ValidationError("I- label does not continue a same-type span", locations)


def parse_conll(text: str, name: str = "", strict: bool = True) -> Corpus:
    """Parse CoNLL-style text into a Corpus.

    Args:
        text: UTF-8 document text.  Blank lines separate sentences; each
            non-blank line carries at least two whitespace-separated fields,
            of which the first is the token and the last is the label.
        name: identifier stored on the returned corpus.
        strict: when True (the default, appropriate for gold data) the
            corpus must satisfy the strict IOB2 transition rules; when False
            orphan I- labels are accepted and handled at span extraction.

    Raises:
        ParseError: malformed line or bad label syntax, with line number.
        ValidationError: strict mode only, listing every violation.
    """
    sentences: list[Sentence] = []
    current: list[Token] = []

    def flush() -> None:
        if current:
            sentences.append(Sentence(tuple(current)))
            current.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ParseError("expected at least two whitespace-separated fields", lineno)
        token_text, label = fields[0], fields[-1]
        if not _LABEL_RE.match(label):
            raise ParseError(f"invalid IOB2 label {label!r}", lineno)
        current.append(Token(token_text, label))
    flush()

    corpus = Corpus(tuple(sentences), name=name)
    if strict:
        validate_corpus(corpus)
    return corpus


def serialize_conll(corpus: Corpus) -> str:
    """Render a corpus in canonical form: ``token<TAB>label`` lines, one
    blank line between sentences, and a trailing newline.  Parsing the
    result reproduces the corpus exactly."""
    blocks = [
        "\n".join(f"{tok.text}\t{tok.label}" for tok in sentence)
        for sentence in corpus.sentences
    ]
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def extract_spans(sentence: Sentence, mode: str = "strict", sentence_index: int = 0) -> list[Span]:
    """Extract entity spans from one sentence, ordered by start and disjoint.

    In strict mode an I- label that does not continue a same-type span is an
    error.  In lenient mode it opens a new span, which matches how
    conventional CoNLL scorers read predicted label sequences.
    """
    if mode not in SPAN_MODES:
        raise ValueError(f"mode must be one of {SPAN_MODES}: {mode!r}")
    spans: list[Span] = []
    open_start: int | None = None
    open_type: str | None = None

    def close(end: int) -> None:
        nonlocal open_start, open_type
        if open_start is not None:
            spans.append(Span(open_type, open_start, end, sentence_index))
            open_start = open_type = None

    for i, tok in enumerate(sentence.tokens):
        label = tok.label
        if label == "O":
            close(i)
        elif label.startswith("B-"):
            close(i)
            open_start, open_type = i, tok.entity_type
        else:
            if open_start is not None and tok.entity_type == open_type:
                continue
            if mode == "strict":
                raise ValidationError(
                    "I- label does not continue a same-type span", [(sentence_index, i)]
                )
            close(i)
            open_start, open_type = i, tok.entity_type
    close(len(sentence.tokens))
    return spans


def corpus_spans(corpus: Corpus, mode: str = "strict") -> list[Span]:
    """All entity spans in the corpus with their sentence indices filled in."""
    return [
        span
        for si, sentence in enumerate(corpus.sentences)
        for span in extract_spans(sentence, mode=mode, sentence_index=si)
    ]


def corpus_stats(original: Corpus, perturbed: Corpus, alignment=None) -> StatsReport:
    """Summarize a perturbation: counts from the original corpus plus the
    fraction of its tokens that were rewritten.

    Without an alignment record both corpora must have identical shapes and
    modified tokens are found by direct text comparison.  Attacks that
    change token counts (synonym replacement) must supply the alignment
    record they produced; every original token covered by a non-copy edit
    then counts as modified.
    """
    if alignment is not None:
        modified = alignment.modified_source_tokens()
    else:
        if original.sentence_count != perturbed.sentence_count:
            raise ShapeMismatchError(
                f"sentence count differs: {original.sentence_count} vs {perturbed.sentence_count}"
            )
        for si, (orig, pert) in enumerate(zip(original.sentences, perturbed.sentences)):
            if len(orig) != len(pert):
                raise ShapeMismatchError(
                    f"sentence {si}: token count differs ({len(orig)} vs {len(pert)}); "
                    "pass the attack's alignment record"
                )
        modified = sum(
            1
            for orig, pert in zip(original.sentences, perturbed.sentences)
            for tok_o, tok_p in zip(orig.tokens, pert.tokens)
            if tok_o.text != tok_p.text
        )
    total = original.token_count
    percentage = modified / total if total else 0.0
    return StatsReport(
        sentence_count=original.sentence_count,
        annotated_sentence_count=original.annotated_sentence_count,
        token_count=total,
        modified_token_percentage=percentage,
    )
