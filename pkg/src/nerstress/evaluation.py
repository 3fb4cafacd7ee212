"""Exact-span evaluation: P/R/F1, confusion matrices, degradation, run aggregation.

A predicted span counts as correct only when its sentence index, token
boundaries, and entity type all match a gold span.  Gold corpora must be
strict-valid IOB2; predictions are read leniently, the way conventional
CoNLL scorers treat model output.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, corpus_spans
from .errors import EvaluationError, ShapeMismatchError

CONFUSION_CLASSES = ("B", "I", "O")


@dataclass(frozen=True)
class TypeScore:
    precision: float
    recall: float
    f1: float
    gold_count: int
    pred_count: int
    correct_count: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "gold_count": self.gold_count,
            "pred_count": self.pred_count,
            "correct_count": self.correct_count,
        }


@dataclass(frozen=True)
class MicroScore:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class EvalReport:
    """Per-type scores plus micro-averaged totals."""

    per_type: Mapping[str, TypeScore]
    micro: MicroScore

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_type", dict(self.per_type))

    def to_dict(self) -> dict:
        return {
            "micro": self.micro.to_dict(),
            "per_type": {t: s.to_dict() for t, s in sorted(self.per_type.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        per_type = {
            t: TypeScore(
                precision=s["precision"],
                recall=s["recall"],
                f1=s["f1"],
                gold_count=s["gold_count"],
                pred_count=s["pred_count"],
                correct_count=s["correct_count"],
            )
            for t, s in data["per_type"].items()
        }
        m = data["micro"]
        return cls(per_type, MicroScore(m["precision"], m["recall"], m["f1"]))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row-normalized label confusion; rows are gold classes.

    ``counts`` holds the raw tallies and sums to the token count; ``rows``
    holds each row divided by its total, left all-zero when the gold class
    never occurs.
    """

    classes: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    rows: tuple[tuple[float, ...], ...]

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "counts": [list(row) for row in self.counts],
            "rows": [list(row) for row in self.rows],
        }


@dataclass(frozen=True)
class DegradationReport:
    """Score drop of an attacked condition relative to its original."""

    original_score: float
    attacked_score: float
    relative_drop: float

    def to_dict(self) -> dict:
        return {
            "original_score": self.original_score,
            "attacked_score": self.attacked_score,
            "relative_drop": self.relative_drop,
        }


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    stdev: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stdev": self.stdev}


@dataclass(frozen=True)
class AggregateReport:
    """Mean and sample standard deviation of scores across repeated runs."""

    runs: int
    micro: Mapping[str, MetricSummary]
    per_type: Mapping[str, Mapping[str, MetricSummary]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "micro", dict(self.micro))
        object.__setattr__(self, "per_type", {t: dict(m) for t, m in self.per_type.items()})

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "micro": {k: v.to_dict() for k, v in self.micro.items()},
            "per_type": {
                t: {k: v.to_dict() for k, v in metrics.items()}
                for t, metrics in sorted(self.per_type.items())
            },
        }


def _check_shapes(gold: Corpus, pred: Corpus) -> None:
    if gold.sentence_count != pred.sentence_count:
        raise ShapeMismatchError(
            f"sentence count differs: gold has {gold.sentence_count}, "
            f"prediction has {pred.sentence_count}"
        )
    for si, (g, p) in enumerate(zip(gold.sentences, pred.sentences)):
        if len(g) != len(p):
            raise ShapeMismatchError(
                f"sentence {si}: token count differs (gold {len(g)}, prediction {len(p)})"
            )


def _prf(correct: int, pred: int, gold: int) -> tuple[float, float, float]:
    precision = correct / pred if pred else 0.0
    recall = correct / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def score(gold: Corpus, pred: Corpus) -> EvalReport:
    """Exact-span micro and per-type precision/recall/F1.

    Both corpora must align sentence-for-sentence and token-for-token.
    Precision is 0 by convention when nothing was predicted, recall is 0
    when a type has no gold spans.
    """
    _check_shapes(gold, pred)
    gold_spans = set(corpus_spans(gold, mode="strict"))
    pred_spans = set(corpus_spans(pred, mode="lenient"))
    correct_spans = gold_spans & pred_spans

    types = sorted({s.entity_type for s in gold_spans} | {s.entity_type for s in pred_spans})
    per_type = {}
    for t in types:
        gold_n = sum(1 for s in gold_spans if s.entity_type == t)
        pred_n = sum(1 for s in pred_spans if s.entity_type == t)
        correct_n = sum(1 for s in correct_spans if s.entity_type == t)
        p, r, f1 = _prf(correct_n, pred_n, gold_n)
        per_type[t] = TypeScore(p, r, f1, gold_n, pred_n, correct_n)

    p, r, f1 = _prf(len(correct_spans), len(pred_spans), len(gold_spans))
    return EvalReport(per_type, MicroScore(p, r, f1))


def _collapse(label: str) -> str:
    return "O" if label == "O" else label[0]


def confusion(gold: Corpus, pred: Corpus, per_type: bool = False) -> ConfusionMatrix:
    """Token-level confusion matrix, rows normalized by gold class totals.

    By default labels collapse onto the three positional classes B/I/O; with
    ``per_type`` the full label set of both corpora is used, sorted with
    ``O`` last.
    """
    _check_shapes(gold, pred)
    pairs = [
        (g.label, p.label)
        for gs, ps in zip(gold.sentences, pred.sentences)
        for g, p in zip(gs.tokens, ps.tokens)
    ]
    if per_type:
        labels = {lab for g, p in pairs for lab in (g, p)} - {"O"}
        classes = tuple(sorted(labels)) + ("O",)
        project = lambda label: label
    else:
        classes = CONFUSION_CLASSES
        project = _collapse
    index = {c: i for i, c in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for g, p in pairs:
        counts[index[project(g)]][index[project(p)]] += 1
    rows = tuple(
        tuple(cell / total if (total := sum(row)) else 0.0 for cell in row) for row in counts
    )
    return ConfusionMatrix(classes, tuple(tuple(row) for row in counts), rows)


def relative_drop(original_score: float, attacked_score: float) -> float:
    """(original - attacked) / original; negative when the attack helps."""
    if original_score <= 0:
        raise EvaluationError("relative degradation is undefined for a zero original score")
    return (original_score - attacked_score) / original_score


def degradation(original: EvalReport, attacked: EvalReport) -> DegradationReport:
    """Micro-F1 drop of the attacked report relative to the original."""
    drop = relative_drop(original.micro.f1, attacked.micro.f1)
    return DegradationReport(original.micro.f1, attacked.micro.f1, drop)


def _summarize(values: Sequence[float]) -> MetricSummary:
    mean = statistics.fmean(values)
    stdev = statistics.stdev(values) if len(values) > 1 else 0.0
    return MetricSummary(mean, stdev)


def aggregate_runs(reports: Iterable[EvalReport]) -> AggregateReport:
    """Mean and sample standard deviation (n-1 denominator) per metric.

    A single run yields a standard deviation of 0.  Per-type metrics are
    aggregated over the runs in which the type appears.
    """
    reports = list(reports)
    if not reports:
        raise EvaluationError("cannot aggregate zero runs")
    micro = {
        metric: _summarize([getattr(r.micro, metric) for r in reports])
        for metric in ("precision", "recall", "f1")
    }
    types = sorted({t for r in reports for t in r.per_type})
    per_type = {}
    for t in types:
        present = [r.per_type[t] for r in reports if t in r.per_type]
        per_type[t] = {
            metric: _summarize([getattr(s, metric) for s in present])
            for metric in ("precision", "recall", "f1")
        }
    return AggregateReport(len(reports), micro, per_type)
