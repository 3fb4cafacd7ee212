"""Stress testing for IOB2 NER corpora.

Generate keyboard-typo, character-swap, and synonym-replacement variants of
CoNLL-style datasets, merge them back into training sets, and measure how a
tagger's exact-span F1 degrades.
"""

from .attacks import (
    ATTACK_KINDS,
    AlignmentRecord,
    AttackConfig,
    KeyboardLayout,
    QWERTY,
    SentenceAlignment,
    TokenEdit,
    apply_attack,
    apply_noise_attack,
    apply_synonym_attack,
    keyboard_perturb_word,
    load_layout,
    swap_perturb_word,
)
from .baseline import Gazetteer, dump_gazetteer, load_gazetteer, tag, train_gazetteer
from .corpus import (
    Corpus,
    Sentence,
    Span,
    StatsReport,
    Token,
    corpus_spans,
    corpus_stats,
    extract_spans,
    iob2_violations,
    parse_conll,
    serialize_conll,
    validate_corpus,
)
from .errors import (
    EvaluationError,
    LayoutError,
    LexiconError,
    ManifestError,
    NerstressError,
    ParseError,
    ShapeMismatchError,
    ValidationError,
)
from .evaluation import (
    AggregateReport,
    ConfusionMatrix,
    DegradationReport,
    EvalReport,
    MetricSummary,
    MicroScore,
    TypeScore,
    aggregate_runs,
    confusion,
    degradation,
    relative_drop,
    score,
)
from .lexicon import Lexicon, dump_lexicon, load_lexicon, lookup, normalize_surface
from .pipeline import (
    ExperimentManifest,
    ExperimentResult,
    PolicySpec,
    load_manifest,
    merge_training,
    run_experiment,
)
from .selection import (
    POLICY_KINDS,
    SelectionPolicy,
    load_vocabulary,
    select_targets,
    split_subwords,
)

__version__ = "0.1.0"

__all__ = [
    "ATTACK_KINDS",
    "AggregateReport",
    "AlignmentRecord",
    "AttackConfig",
    "ConfusionMatrix",
    "Corpus",
    "DegradationReport",
    "EvalReport",
    "EvaluationError",
    "ExperimentManifest",
    "ExperimentResult",
    "Gazetteer",
    "KeyboardLayout",
    "LayoutError",
    "Lexicon",
    "LexiconError",
    "ManifestError",
    "MetricSummary",
    "MicroScore",
    "NerstressError",
    "POLICY_KINDS",
    "ParseError",
    "PolicySpec",
    "QWERTY",
    "SelectionPolicy",
    "Sentence",
    "SentenceAlignment",
    "ShapeMismatchError",
    "Span",
    "StatsReport",
    "Token",
    "TokenEdit",
    "TypeScore",
    "ValidationError",
    "aggregate_runs",
    "apply_attack",
    "apply_noise_attack",
    "apply_synonym_attack",
    "confusion",
    "corpus_spans",
    "corpus_stats",
    "degradation",
    "dump_gazetteer",
    "dump_lexicon",
    "extract_spans",
    "iob2_violations",
    "keyboard_perturb_word",
    "load_gazetteer",
    "load_layout",
    "load_lexicon",
    "load_manifest",
    "load_vocabulary",
    "lookup",
    "merge_training",
    "normalize_surface",
    "parse_conll",
    "relative_drop",
    "run_experiment",
    "score",
    "select_targets",
    "serialize_conll",
    "split_subwords",
    "swap_perturb_word",
    "tag",
    "train_gazetteer",
    "validate_corpus",
]
