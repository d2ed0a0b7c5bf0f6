"""Measure copying in translation outputs and control it at decoding time."""

__version__ = "0.1.0"

from .corpus import Corpus, ParallelExample, Sentence, Token, load_parallel, tokenize
from .decoder import (
    Hypothesis,
    PenaltyConfig,
    Vocabulary,
    apply_copy_penalty,
    beam_search,
    copy_mask,
    decode_corpus,
    exhaustive_decode,
    length_norm,
    penalty_sweep,
)
from .estimators import CopyingAnalyzer, CopyPenaltyTranslator
from .metrics import (
    BucketedStats,
    CopyStats,
    CurvePoint,
    bucket_by_pos,
    copy_stats,
    corpus_bleu,
    count_high_overlap,
    group_by_key,
    is_copy_token,
    learning_curve,
    sentence_overlap,
)
from .toymodel import LexiconModel, build_lexicon

__all__ = [
    "BucketedStats",
    "CopyPenaltyTranslator",
    "CopyStats",
    "CopyingAnalyzer",
    "Corpus",
    "CurvePoint",
    "Hypothesis",
    "LexiconModel",
    "ParallelExample",
    "PenaltyConfig",
    "Sentence",
    "Token",
    "Vocabulary",
    "apply_copy_penalty",
    "beam_search",
    "bucket_by_pos",
    "build_lexicon",
    "copy_mask",
    "copy_stats",
    "corpus_bleu",
    "count_high_overlap",
    "decode_corpus",
    "exhaustive_decode",
    "group_by_key",
    "is_copy_token",
    "learning_curve",
    "length_norm",
    "load_parallel",
    "penalty_sweep",
    "sentence_overlap",
    "tokenize",
]
