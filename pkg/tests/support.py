"""Shared generators and independent reference implementations for tests.

The reference span extractor and scorer here are deliberately written from
scratch (quadratic candidate checking instead of a linear scan) so the
library is always checked against an independent route.
"""

from __future__ import annotations

import random

from nerstress import Corpus, Sentence, Token

LOWER = "abcdefghijklmnopqrstuvwxyz"


# ---------------------------------------------------------------- oracles


def subwords(text: str) -> list[tuple[str, int]]:
    """Independent hyphen splitter: (segment, offset) pairs, empties dropped."""
    out = []
    pos = 0
    for part in text.split("-"):
        if part:
            out.append((part, pos))
        pos += len(part) + 1
    return out


def lenient_span_oracle(labels: list[str]) -> set[tuple[str, int, int]]:
    """All (type, start, end) spans under lenient reading, by checking every
    candidate range against the maximal-run predicate."""
    n = len(labels)
    types = {lab[2:] for lab in labels if lab != "O"}
    found = set()
    for t in types:
        b, i = f"B-{t}", f"I-{t}"
        for s in range(n):
            for e in range(s + 1, n + 1):
                head = labels[s] == b or (
                    labels[s] == i and (s == 0 or labels[s - 1] not in (b, i))
                )
                body = all(labels[k] == i for k in range(s + 1, e))
                tail = e == n or labels[e] != i
                if head and body and tail:
                    found.add((t, s, e))
    return found


def _prf(correct: int, pred: int, gold: int) -> tuple[float, float, float]:
    precision = correct / pred if pred else 0.0
    recall = correct / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def oracle_score(gold: Corpus, pred: Corpus):
    """Reference scorer: span sets from the oracle extractor, intersected.

    Returns (per_type, micro) where per_type maps type to
    ((p, r, f1), (gold_n, pred_n, correct_n)) and micro is (p, r, f1).
    """
    gold_spans: set[tuple] = set()
    pred_spans: set[tuple] = set()
    for si, (gs, ps) in enumerate(zip(gold.sentences, pred.sentences)):
        gold_spans |= {(si, t, s, e) for (t, s, e) in lenient_span_oracle(list(gs.labels))}
        pred_spans |= {(si, t, s, e) for (t, s, e) in lenient_span_oracle(list(ps.labels))}
    correct = gold_spans & pred_spans
    per_type = {}
    for t in {x[1] for x in gold_spans | pred_spans}:
        g = sum(1 for x in gold_spans if x[1] == t)
        p = sum(1 for x in pred_spans if x[1] == t)
        c = sum(1 for x in correct if x[1] == t)
        per_type[t] = (_prf(c, p, g), (g, p, c))
    micro = _prf(len(correct), len(pred_spans), len(gold_spans))
    return per_type, micro


# ------------------------------------------------------------- generators


def random_word(rng: random.Random, min_len: int = 1, max_len: int = 10) -> str:
    return "".join(rng.choice(LOWER) for _ in range(rng.randint(min_len, max_len)))


def random_strict_labels(rng: random.Random, n: int, types: tuple[str, ...]) -> list[str]:
    """A valid strict-IOB2 label sequence of length n."""
    labels = []
    open_type = None
    for _ in range(n):
        options = ["O", "O"] + [f"B-{t}" for t in types]
        if open_type is not None:
            options += [f"I-{open_type}", f"I-{open_type}"]
        lab = rng.choice(options)
        labels.append(lab)
        open_type = None if lab == "O" else lab[2:]
    return labels


def random_any_labels(rng: random.Random, n: int, types: tuple[str, ...]) -> list[str]:
    """An arbitrary label sequence (may contain orphan I- labels)."""
    pool = ["O"] + [f"{p}-{t}" for t in types for p in "BI"]
    return [rng.choice(pool) for _ in range(n)]


def random_gold_corpus(
    rng: random.Random,
    max_sentences: int = 5,
    max_tokens: int = 10,
    types: tuple[str, ...] = ("Chemical", "Disease"),
) -> Corpus:
    sentences = []
    for _ in range(rng.randint(1, max_sentences)):
        n = rng.randint(1, max_tokens)
        labels = random_strict_labels(rng, n, types)
        tokens = tuple(Token(random_word(rng, 1, 10), lab) for lab in labels)
        sentences.append(Sentence(tokens))
    return Corpus(tuple(sentences))


def random_pred_corpus(
    rng: random.Random, gold: Corpus, types: tuple[str, ...] = ("Chemical", "Disease")
) -> Corpus:
    sentences = []
    for sent in gold.sentences:
        labels = random_any_labels(rng, len(sent), types)
        sentences.append(Sentence(tuple(Token(tok.text, lab) for tok, lab in zip(sent, labels))))
    return Corpus(tuple(sentences))


# -------------------------------------------------- conformance sentence


TOCOPHEROL_TEXTS = (
    "Linoleic", "acid", "autoxidation", "inhibitions", "on", "all", "fractions",
    "were", "higher", "than", "that", "on", "alpha-tocopherol", ".",
)
TOCOPHEROL_LABELS = ("O",) * 12 + ("B-Chemical", "O")
TOCOPHEROL_VOCAB = frozenset(
    {"acid", "autoxidation", "inhibitions", "fractions", "alpha-tocopherol"}
)
TOCOPHEROL_TARGETS = {1, 2, 3, 6, 12}


def tocopherol_corpus() -> Corpus:
    tokens = tuple(Token(t, l) for t, l in zip(TOCOPHEROL_TEXTS, TOCOPHEROL_LABELS))
    return Corpus((Sentence(tokens),), name="conformance")


# --------------------------------------------------- synthetic benchmark


FILLERS = ("the", "of", "in", "and", "with", "was", "for", "on", "at", "to")


def synthetic_dataset(rng: random.Random, n_sentences: int = 500, n_entities: int = 80) -> Corpus:
    """A memorizable benchmark: long unique pseudo-word entities between
    short filler words, one entity mention per sentence.

    Entity words are 6 to 10 letters with at least two distinct characters,
    so both noise attacks always change every entity token; fillers are at
    most four characters and can never collide with entity surfaces.
    """
    entities: list[tuple[tuple[str, ...], str]] = []
    seen: set[tuple[str, ...]] = set()
    while len(entities) < n_entities:
        k = rng.choice([1, 1, 1, 2])
        words = tuple(random_word(rng, 6, 10) for _ in range(k))
        if words in seen or any(len(set(w)) < 2 for w in words):
            continue
        seen.add(words)
        entities.append((words, rng.choice(["Chemical", "Disease"])))
    sentences = []
    for i in range(n_sentences):
        tokens = [Token(rng.choice(FILLERS), "O") for _ in range(rng.randint(2, 5))]
        words, etype = entities[i % len(entities)]
        tokens.append(Token(words[0], f"B-{etype}"))
        tokens.extend(Token(w, f"I-{etype}") for w in words[1:])
        tokens.extend(Token(rng.choice(FILLERS), "O") for _ in range(rng.randint(1, 4)))
        sentences.append(Sentence(tuple(tokens)))
    return Corpus(tuple(sentences), name="synthetic")


# ------------------------------------------------- perturbation checking


def check_keyboard_output(original: str, perturbed: str, layout) -> None:
    """Assert the keyboard-attack contract for one word."""
    assert len(perturbed) == len(original), (original, perturbed)
    covered_segments = []
    checked = [False] * len(original)
    for seg, off in subwords(original):
        out_seg = perturbed[off : off + len(seg)]
        for k in range(len(seg)):
            checked[off + k] = True
        eligible = len(seg) >= 3 and any(ch.lower() in layout.adjacency for ch in seg)
        if not eligible:
            assert out_seg == seg, (original, perturbed, seg)
            continue
        diffs = [k for k in range(len(seg)) if seg[k] != out_seg[k]]
        assert len(diffs) == 1, (original, perturbed, seg)
        k = diffs[0]
        old, new = seg[k], out_seg[k]
        assert old.lower() in layout.adjacency, (original, perturbed)
        assert new.lower() in layout.adjacency[old.lower()], (original, perturbed)
        expected = new.lower().upper() if old.isupper() and len(new.lower().upper()) == 1 else new.lower()
        assert new == expected, (original, perturbed)
        covered_segments.append(seg)
    for pos, done in enumerate(checked):
        if not done:
            assert perturbed[pos] == original[pos] == "-", (original, perturbed)


def check_swap_output(original: str, perturbed: str) -> None:
    """Assert the swap-attack contract for one word."""
    assert len(perturbed) == len(original), (original, perturbed)
    assert sorted(perturbed) == sorted(original), (original, perturbed)
    for seg, off in subwords(original):
        out_seg = perturbed[off : off + len(seg)]
        eligible = len(seg) >= 3 and any(seg[k] != seg[k + 1] for k in range(len(seg) - 1))
        if not eligible:
            assert out_seg == seg, (original, perturbed, seg)
            continue
        diffs = [k for k in range(len(seg)) if seg[k] != out_seg[k]]
        assert len(diffs) == 2, (original, perturbed, seg)
        j, k = diffs
        assert k == j + 1, (original, perturbed, seg)
        assert out_seg[j] == seg[k] and out_seg[k] == seg[j], (original, perturbed, seg)
        assert seg[j] != seg[k], (original, perturbed, seg)


def random_attack_token(rng: random.Random) -> str:
    """Messy token mix: letters of both cases, digits, hyphens, non-keyboard
    characters."""
    alphabet = LOWER + LOWER.upper() + "0123456789"
    specials = "αβγéñ"
    chars = []
    for _ in range(rng.randint(1, 14)):
        r = rng.random()
        if r < 0.08:
            chars.append("-")
        elif r < 0.12:
            chars.append(rng.choice(specials))
        else:
            chars.append(rng.choice(alphabet))
    return "".join(chars)
