"""scikit-learn compatible wrappers.

:class:`CopyPenaltyTranslator` exposes the copying-penalty decoder through
``fit``/``predict``/``score`` so that ``alpha`` can be tuned on held-out data
with the usual model-selection tools::

    from sklearn.model_selection import GridSearchCV
    search = GridSearchCV(CopyPenaltyTranslator(model=lex), {"alpha": [0.5, 0.7, 1.0]}, cv=3)
    search.fit(dev_sources, dev_references)

:class:`CopyingAnalyzer` turns (source, hypothesis[, reference]) rows into
per-sentence copy counts.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import Corpus, ParallelExample, tokenize
from .decoder import PenaltyConfig, decode_corpus
from .metrics import CopyStats, copy_stats, corpus_bleu, count_high_overlap, sentence_stats
from .validation import check_paired, check_sentences, check_text_columns


class CopyPenaltyTranslator(BaseEstimator):
    """Beam-search translator with a copying penalty.

    Parameters
    ----------
    model : ScoringModel
        Provides ``next_logprobs``. Its ``vocab`` attribute is used when
        ``vocab`` is not given.
    vocab : Vocabulary, optional
    alpha : float, default=1.0
        Multiplier on the probability of tokens that copy a source word.
    beam : int, default=5
    length_exp : float, default=0.0
        Exponent of the GNMT length normalizer.
    max_len : int, default=200
    oracle : bool, default=False
        Use exhaustive search instead of beam search.
    merge_subwords : bool, default=False
    n_jobs : int, optional
        Threads used to decode sentences in parallel.
    """

    def __init__(
        self,
        model=None,
        vocab=None,
        alpha=1.0,
        beam=5,
        length_exp=0.0,
        max_len=200,
        oracle=False,
        merge_subwords=False,
        n_jobs=None,
    ):
        self.model = model
        self.vocab = vocab
        self.alpha = alpha
        self.beam = beam
        self.length_exp = length_exp
        self.max_len = max_len
        self.oracle = oracle
        self.merge_subwords = merge_subwords
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        """Validate the parameters. Nothing is learned; the model is fixed."""
        if self.model is None or not hasattr(self.model, "next_logprobs"):
            raise ValueError("model must provide next_logprobs(source, prefix)")
        vocab = self.vocab if self.vocab is not None else getattr(self.model, "vocab", None)
        if vocab is None:
            raise ValueError("no vocabulary: pass vocab= or use a model with a .vocab attribute")
        if X is not None and y is not None:
            check_paired(X, y)
        self.config_ = PenaltyConfig(self.alpha, self.length_exp, self.beam, self.max_len)
        self.vocab_ = vocab
        return self

    def decode(self, X):
        """Best :class:`~copyctl.decoder.Hypothesis` for each source sentence."""
        check_is_fitted(self, "config_")
        sources = [tokenize(s, self.merge_subwords) for s in check_sentences(X)]
        return decode_corpus(
            self.model, sources, self.vocab_, self.config_, oracle=self.oracle, n_jobs=self.n_jobs
        )

    def predict(self, X):
        hyps = self.decode(X)
        return np.array([" ".join(self.vocab_.words(h.tokens)) for h in hyps], dtype=object)

    def score(self, X, y):
        """Corpus BLEU of the translations of ``X`` against references ``y``."""
        X, y = check_paired(X, y)
        return corpus_bleu(list(self.predict(X)), y)


class CopyingAnalyzer(TransformerMixin, BaseEstimator):
    """Per-sentence copy counts for (source, hypothesis[, reference]) rows.

    ``transform`` returns columns ``copy_tokens, total_tokens, copy_errors,
    overlap``; ``copy_errors`` is NaN for rows without a reference.
    """

    def __init__(self, lowercase=False, keep_punct_denominator=False, merge_subwords=False, threshold=0.5):
        self.lowercase = lowercase
        self.keep_punct_denominator = keep_punct_denominator
        self.merge_subwords = merge_subwords
        self.threshold = threshold

    def fit(self, X, y=None):
        rows = check_text_columns(X)
        self.n_features_in_ = len(rows[0]) if rows else 2
        return self

    def _corpus(self, X) -> Corpus:
        rows = check_text_columns(X)
        m = self.merge_subwords
        return Corpus(
            tuple(
                ParallelExample(
                    tokenize(r[0], m), tokenize(r[1], m), tokenize(r[2], m) if len(r) == 3 else None
                )
                for r in rows
            )
        )

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        out = []
        for ex in self._corpus(X):
            s = sentence_stats(ex, self.lowercase, self.keep_punct_denominator)
            overlap = sentence_stats(ex, self.lowercase).ratio
            out.append(
                [s.copy_tokens, s.total_tokens, np.nan if s.copy_errors is None else s.copy_errors, overlap]
            )
        return np.array(out, dtype=float).reshape(-1, 4)

    def get_feature_names_out(self, input_features=None):
        return np.array(["copy_tokens", "total_tokens", "copy_errors", "overlap"], dtype=object)

    def report(self, X) -> tuple[CopyStats, int]:
        """Corpus-level stats and the number of sentences above ``threshold`` overlap."""
        corpus = self._corpus(X)
        return (
            copy_stats(corpus, self.lowercase, self.keep_punct_denominator),
            count_high_overlap(corpus, self.threshold, self.lowercase),
        )
