"""Plain-text table renderers for reports."""

from __future__ import annotations

from .corpus import StatsReport
from .evaluation import AggregateReport, ConfusionMatrix, DegradationReport, EvalReport


def _grid(rows: list[list[str]], indent: str = "") -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [cell.ljust(w) for cell, w in zip(row, widths)]
        lines.append((indent + "  ".join(cells)).rstrip())
    return "\n".join(lines)


def format_eval_report(report: EvalReport) -> str:
    rows = [["type", "precision", "recall", "f1", "gold", "pred", "correct"]]
    for t, s in sorted(report.per_type.items()):
        rows.append(
            [t, f"{s.precision:.3f}", f"{s.recall:.3f}", f"{s.f1:.3f}",
             str(s.gold_count), str(s.pred_count), str(s.correct_count)]
        )
    m = report.micro
    rows.append(["micro", f"{m.precision:.3f}", f"{m.recall:.3f}", f"{m.f1:.3f}", "", "", ""])
    return _grid(rows)


def format_confusion(matrix: ConfusionMatrix) -> str:
    rows = [["gold\\pred"] + list(matrix.classes)]
    for cls, row in zip(matrix.classes, matrix.rows):
        rows.append([cls] + [f"{cell:.3f}" for cell in row])
    return _grid(rows)


def format_stats(stats: StatsReport) -> str:
    rows = [
        ["sentences", str(stats.sentence_count)],
        ["annotated sentences", str(stats.annotated_sentence_count)],
        ["tokens", str(stats.token_count)],
        ["modified tokens", f"{100 * stats.modified_token_percentage:.1f}%"],
    ]
    return _grid(rows)


def format_degradation(report: DegradationReport) -> str:
    return (
        f"original {report.original_score:.3f}  attacked {report.attacked_score:.3f}  "
        f"relative drop {report.relative_drop:.4f}"
    )


def format_dataset_summary(
    train: dict[str, StatsReport], test: dict[str, StatsReport], attacks: list[str]
) -> str:
    """One-row dataset summary; train/test values separated by a slash.

    ``train`` and ``test`` map attack kind to the StatsReport of that
    attack's perturbation; counts are read from any of them.
    """
    some = next(iter(train.values()))
    some_test = next(iter(test.values()))
    header = ["# sentences (annotated)", "# tokens"] + [f"% {kind}" for kind in attacks]
    row = [
        f"{some.sentence_count} ({some.annotated_sentence_count}) / "
        f"{some_test.sentence_count} ({some_test.annotated_sentence_count})",
        f"{some.token_count} / {some_test.token_count}",
    ]
    for kind in attacks:
        row.append(
            f"{100 * train[kind].modified_token_percentage:.1f} / "
            f"{100 * test[kind].modified_token_percentage:.1f}"
        )
    return _grid([header, row])


def format_score_grid(
    attack: str,
    original: AggregateReport,
    attacked: AggregateReport,
    augmented_original: AggregateReport,
    augmented_attacked: AggregateReport,
) -> str:
    """Micro-F1 grid for one attack: training condition rows, test columns,
    three decimals with the sample standard deviation on the line beneath."""

    def cell(agg: AggregateReport) -> tuple[str, str]:
        f1 = agg.micro["f1"]
        return f"{f1.mean:.3f}", f"±{f1.stdev:.3f}"

    rows = [["training", "test=original", f"test={attack}"]]
    for name, left, right in (
        ("original", original, attacked),
        (f"original+{attack}", augmented_original, augmented_attacked),
    ):
        (lv, ls), (rv, rs) = cell(left), cell(right)
        rows.append([name, lv, rv])
        rows.append(["", ls, rs])
    return _grid(rows)
