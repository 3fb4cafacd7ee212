"""Experiment orchestration: perturb, merge, train, score, and report.

A manifest names the datasets, attacks, seeds, and output directory.  The
runner generates one directory of artifacts per (attack, seed) condition,
scores the gazetteer baseline under original, attacked, and
adversarially-augmented training, aggregates across seeds, and writes a
JSON index of everything last.  Outputs are byte-identical for a fixed
manifest regardless of worker count.
"""

from __future__ import annotations

import hashlib
import json
import random
import shutil
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from .attacks import ATTACK_KINDS, AttackConfig, KeyboardLayout, apply_attack, load_layout
from .baseline import Gazetteer, tag, train_gazetteer
from .corpus import Corpus, StatsReport, corpus_stats, parse_conll, serialize_conll, validate_corpus
from .errors import ManifestError
from .evaluation import (
    EvalReport,
    aggregate_runs,
    degradation,
    score,
)
from .lexicon import Lexicon, load_lexicon
from .selection import POLICY_KINDS, SelectionPolicy, load_vocabulary
from . import tables

_ATTACK_ALIASES = {"k": "keyboard", "w": "swap", "s": "synonym"}

REPORT_FORMATS = ("json", "table")


def normalize_attack(kind: str) -> str:
    """Map the single-letter aliases onto full attack names."""
    full = _ATTACK_ALIASES.get(kind.lower(), kind.lower())
    if full not in ATTACK_KINDS:
        raise ManifestError(f"unknown attack kind: {kind!r}")
    return full


@dataclass(frozen=True)
class PolicySpec:
    """Selection policy as written in a manifest; the vocabulary is a path."""

    kind: str = "union"
    vocabulary_path: str | None = None
    min_word_length: int = 3

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ManifestError(f"unknown policy kind: {self.kind!r}")
        if self.min_word_length < 1:
            raise ManifestError("min_word_length must be at least 1")


@dataclass(frozen=True)
class ExperimentManifest:
    """Declarative description of one experiment."""

    train_path: str
    test_path: str
    output_dir: str
    attacks: tuple[str, ...] = ()
    seeds: tuple[int, ...] = (0,)
    formats: tuple[str, ...] = ("json",)
    policy: PolicySpec = field(default_factory=PolicySpec)
    lexicon_path: str | None = None
    layout_path: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "attacks", tuple(normalize_attack(a) for a in self.attacks))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "formats", tuple(self.formats))
        if not self.seeds:
            raise ManifestError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ManifestError("seeds must be distinct")
        if Path(self.train_path) == Path(self.test_path):
            raise ManifestError("train and test paths must be distinct")
        for fmt in self.formats:
            if fmt not in REPORT_FORMATS:
                raise ManifestError(f"unknown report format: {fmt!r}")
        if "synonym" in self.attacks and self.lexicon_path is None:
            raise ManifestError("the synonym attack requires a lexicon")


def load_manifest(path: str | Path) -> ExperimentManifest:
    """Read a JSON manifest; relative paths resolve against its directory.

    Keys: ``train``, ``test``, ``output_dir`` (required); ``attacks``,
    ``seeds``, ``formats``, ``policy`` (object with ``kind``,
    ``vocabulary``, ``min_word_length``), ``lexicon``, ``layout``.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ManifestError(f"manifest is not valid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    base = path.parent

    def resolve(key: str, required: bool = False) -> str | None:
        value = data.get(key)
        if value is None:
            if required:
                raise ManifestError(f"manifest is missing {key!r}")
            return None
        return str(base / value)

    policy_data = data.get("policy", {})
    if not isinstance(policy_data, dict):
        raise ManifestError("policy must be a JSON object")
    vocab = policy_data.get("vocabulary")
    policy = PolicySpec(
        kind=policy_data.get("kind", "union"),
        vocabulary_path=str(base / vocab) if vocab else None,
        min_word_length=policy_data.get("min_word_length", 3),
    )
    return ExperimentManifest(
        train_path=resolve("train", required=True),
        test_path=resolve("test", required=True),
        output_dir=resolve("output_dir", required=True),
        attacks=tuple(data.get("attacks", ())),
        seeds=tuple(data.get("seeds", (0,))),
        formats=tuple(data.get("formats", ("json",))),
        policy=policy,
        lexicon_path=resolve("lexicon"),
        layout_path=resolve("layout"),
    )


def _merge_rng(seed: int) -> random.Random:
    digest = hashlib.blake2b(struct.pack("<Q", seed) + b":merge", digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "little"))


def merge_training(original: Corpus, adversarial: Corpus, seed: int) -> Corpus:
    """Union of both corpora's sentences in a deterministic shuffled order."""
    validate_corpus(original)
    validate_corpus(adversarial)
    sentences = list(original.sentences) + list(adversarial.sentences)
    _merge_rng(seed).shuffle(sentences)
    name = f"{original.name}+{adversarial.name}" if original.name or adversarial.name else ""
    return Corpus(tuple(sentences), name=name)


@dataclass(frozen=True)
class ExperimentResult:
    output_dir: str
    report: dict
    artifacts: tuple[str, ...]


@dataclass(frozen=True)
class _ConditionOutcome:
    attacked: EvalReport
    augmented_original: EvalReport
    augmented_attacked: EvalReport
    train_stats: dict
    test_stats: dict


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _counts(corpus: Corpus) -> dict:
    return {
        "sentence_count": corpus.sentence_count,
        "annotated_sentence_count": corpus.annotated_sentence_count,
        "token_count": corpus.token_count,
    }


def _build_policy(spec: PolicySpec) -> SelectionPolicy:
    vocabulary = None
    if spec.kind in ("vocabulary", "union"):
        if spec.vocabulary_path is not None:
            vocabulary = load_vocabulary(Path(spec.vocabulary_path).read_text(encoding="utf-8"))
        else:
            vocabulary = frozenset()
    return SelectionPolicy(spec.kind, vocabulary, spec.min_word_length)


def _make_config(
    kind: str,
    seed: int,
    policy: SelectionPolicy,
    lexicon: Lexicon | None,
    layout: KeyboardLayout | None,
) -> AttackConfig:
    if kind == "synonym":
        return AttackConfig(kind="synonym", seed=seed, lexicon=lexicon)
    return AttackConfig(kind=kind, seed=seed, policy=policy, layout=layout)


class _Workspace:
    """Tracks every path the runner writes so failures leave nothing behind."""

    def __init__(self, root: Path):
        self.root = root
        self.created_root = not root.exists()
        self.files: list[Path] = []
        self.dirs: list[Path] = []

    def open_root(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def write(self, relative: str, content: str) -> None:
        target = self.root / relative
        missing = []
        parent = target.parent
        while parent != self.root and not parent.exists():
            missing.append(parent)
            parent = parent.parent
        for d in reversed(missing):
            # exist_ok: sibling conditions may create a shared attack
            # directory concurrently
            d.mkdir(exist_ok=True)
            self.dirs.append(d)
        target.write_text(content, encoding="utf-8", newline="\n")
        self.files.append(target)

    def discard(self) -> None:
        if self.created_root:
            shutil.rmtree(self.root, ignore_errors=True)
            return
        for f in self.files:
            try:
                f.unlink()
            except OSError:
                pass
        for d in sorted(set(self.dirs), key=lambda p: len(p.parts), reverse=True):
            try:
                d.rmdir()
            except OSError:
                pass

    def artifact_names(self) -> list[str]:
        return sorted(str(PurePosixPath(f.relative_to(self.root))) for f in self.files)


def _run_condition(
    kind: str,
    seed: int,
    train: Corpus,
    test: Corpus,
    gazetteer: Gazetteer,
    original_report: EvalReport,
    policy: SelectionPolicy,
    lexicon: Lexicon | None,
    layout: KeyboardLayout | None,
    workspace: _Workspace,
) -> _ConditionOutcome:
    config = _make_config(kind, seed, policy, lexicon, layout)
    train_adv, train_align = apply_attack(train, config)
    test_adv, test_align = apply_attack(test, config)
    merged = merge_training(train, train_adv, seed)
    augmented_gazetteer = train_gazetteer(merged)

    attacked = score(test_adv, tag(gazetteer, test_adv))
    augmented_original = score(test, tag(augmented_gazetteer, test))
    augmented_attacked = score(test_adv, tag(augmented_gazetteer, test_adv))
    train_stats = corpus_stats(train, train_adv, train_align).to_dict()
    test_stats = corpus_stats(test, test_adv, test_align).to_dict()

    scores = {
        "attacked": attacked.to_dict(),
        "augmented_original": augmented_original.to_dict(),
        "augmented_attacked": augmented_attacked.to_dict(),
        "degradation": (
            degradation(original_report, attacked).to_dict()
            if original_report.micro.f1 > 0
            else None
        ),
        "augmented_degradation": (
            degradation(augmented_original, augmented_attacked).to_dict()
            if augmented_original.micro.f1 > 0
            else None
        ),
    }

    prefix = f"{kind}/seed_{seed}"
    workspace.write(f"{prefix}/train.conll", serialize_conll(train_adv))
    workspace.write(f"{prefix}/test.conll", serialize_conll(test_adv))
    workspace.write(f"{prefix}/merged_train.conll", serialize_conll(merged))
    workspace.write(f"{prefix}/train.alignment.json", _dump_json(train_align.to_dict()))
    workspace.write(f"{prefix}/test.alignment.json", _dump_json(test_align.to_dict()))
    workspace.write(f"{prefix}/stats.json", _dump_json({"train": train_stats, "test": test_stats}))
    workspace.write(f"{prefix}/scores.json", _dump_json(scores))
    return _ConditionOutcome(attacked, augmented_original, augmented_attacked, train_stats, test_stats)


def run_experiment(
    manifest: ExperimentManifest, workers: int = 1, output_dir: str | Path | None = None
) -> ExperimentResult:
    """Execute every (attack, seed) condition of the manifest.

    All inputs are read and validated before anything is written; a failure
    partway through removes whatever was already written.  ``workers``
    controls how many conditions run concurrently and never changes the
    output bytes.  ``output_dir`` overrides the manifest's directory.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    train = parse_conll(Path(manifest.train_path).read_text(encoding="utf-8"), name="train")
    test = parse_conll(Path(manifest.test_path).read_text(encoding="utf-8"), name="test")
    policy = _build_policy(manifest.policy)
    lexicon = (
        load_lexicon(Path(manifest.lexicon_path).read_text(encoding="utf-8"))
        if manifest.lexicon_path is not None
        else None
    )
    layout = (
        load_layout(Path(manifest.layout_path).read_text(encoding="utf-8"))
        if manifest.layout_path is not None
        else None
    )

    gazetteer = train_gazetteer(train)
    original_report = score(test, tag(gazetteer, test))

    workspace = _Workspace(Path(output_dir if output_dir is not None else manifest.output_dir))
    workspace.open_root()
    try:
        workspace.write("original/scores.json", _dump_json(original_report.to_dict()))

        conditions = [(kind, seed) for kind in manifest.attacks for seed in manifest.seeds]
        outcomes: dict[tuple[str, int], _ConditionOutcome] = {}
        if conditions:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {
                    (kind, seed): pool.submit(
                        _run_condition,
                        kind,
                        seed,
                        train,
                        test,
                        gazetteer,
                        original_report,
                        policy,
                        lexicon,
                        layout,
                        workspace,
                    )
                    for kind, seed in conditions
                }
            for key, future in futures.items():
                outcomes[key] = future.result()

        report = _build_report(manifest, train, test, original_report, outcomes)
        workspace.write("report.json", _dump_json(report))
        if "table" in manifest.formats:
            workspace.write("report.txt", _render_report_text(manifest, original_report, outcomes))

        index = {
            "attacks": list(manifest.attacks),
            "seeds": list(manifest.seeds),
            "artifacts": workspace.artifact_names(),
        }
        workspace.write("index.json", _dump_json(index))
    except BaseException:
        workspace.discard()
        raise
    return ExperimentResult(str(workspace.root), report, tuple(workspace.artifact_names()))


def _build_report(
    manifest: ExperimentManifest,
    train: Corpus,
    test: Corpus,
    original_report: EvalReport,
    outcomes: dict[tuple[str, int], "_ConditionOutcome"],
) -> dict:
    seeds = sorted(manifest.seeds)
    report = {
        "dataset": {"train": _counts(train), "test": _counts(test)},
        "seeds": list(manifest.seeds),
        "original": original_report.to_dict(),
        "attacks": {},
    }
    for kind in manifest.attacks:
        per_seed = [outcomes[(kind, seed)] for seed in seeds]
        attacked_agg = aggregate_runs([o.attacked for o in per_seed])
        augmented_original_agg = aggregate_runs([o.augmented_original for o in per_seed])
        augmented_attacked_agg = aggregate_runs([o.augmented_attacked for o in per_seed])
        entry = {
            "stats": {"train": per_seed[0].train_stats, "test": per_seed[0].test_stats},
            "scores": {
                "attacked": attacked_agg.to_dict(),
                "augmented_original": augmented_original_agg.to_dict(),
                "augmented_attacked": augmented_attacked_agg.to_dict(),
            },
            "degradation": {
                "baseline": _mean_degradation(
                    original_report.micro.f1, attacked_agg.micro["f1"].mean
                ),
                "augmented": _mean_degradation(
                    augmented_original_agg.micro["f1"].mean,
                    augmented_attacked_agg.micro["f1"].mean,
                ),
            },
        }
        report["attacks"][kind] = entry
    return report


def _mean_degradation(original_f1: float, attacked_f1: float) -> dict | None:
    if original_f1 <= 0:
        return None
    return {
        "original_score": original_f1,
        "attacked_score": attacked_f1,
        "relative_drop": (original_f1 - attacked_f1) / original_f1,
    }


def _render_report_text(
    manifest: ExperimentManifest,
    original_report: EvalReport,
    outcomes: dict[tuple[str, int], "_ConditionOutcome"],
) -> str:
    seeds = sorted(manifest.seeds)
    sections = []
    if manifest.attacks:
        train_stats = {
            kind: StatsReport(**outcomes[(kind, seeds[0])].train_stats)
            for kind in manifest.attacks
        }
        test_stats = {
            kind: StatsReport(**outcomes[(kind, seeds[0])].test_stats)
            for kind in manifest.attacks
        }
        sections.append("Dataset (train / test)")
        sections.append(
            tables.format_dataset_summary(train_stats, test_stats, list(manifest.attacks))
        )
    sections.append(f"Baseline on original test: micro F1 {original_report.micro.f1:.3f}")
    original_agg = aggregate_runs([original_report] * len(seeds))
    for kind in manifest.attacks:
        per_seed = [outcomes[(kind, seed)] for seed in seeds]
        sections.append("")
        sections.append(f"Attack: {kind} ({len(seeds)} seed{'s' if len(seeds) != 1 else ''})")
        sections.append(
            tables.format_score_grid(
                kind,
                original_agg,
                aggregate_runs([o.attacked for o in per_seed]),
                aggregate_runs([o.augmented_original for o in per_seed]),
                aggregate_runs([o.augmented_attacked for o in per_seed]),
            )
        )
    return "\n".join(sections) + "\n"
