"""Beam search with a copying penalty.

At every step the log-probability of each vocabulary entry that also occurs
in the source sentence (punctuation and control tokens excluded) is shifted
by ``ln(alpha)``, i.e. its probability is multiplied by ``alpha``. Nothing is
renormalized. ``alpha < 1`` discourages copying, ``alpha > 1`` encourages it
and ``alpha == 1`` is plain beam search.

Scores are kept as ``(raw log-probability, copy count)`` pairs and the
penalized value is always ``raw + copy_count * ln(alpha)``, so beam search and
the exhaustive oracle compute bit-identical scores for the same sequence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

from .corpus import Corpus, ParallelExample, Sentence, is_punct
from .exceptions import InputError, ModelVocabMismatch, SearchSpaceTooLarge
from .metrics import CopyStats, copy_stats, corpus_bleu

# log-probabilities at or below this value mean "impossible"
LOGPROB_FLOOR = -1e9
MAX_SEARCH_SPACE = 10**7


class Vocabulary:
    """Dense id <-> surface mapping with reserved ``bos``, ``eos`` and ``unk`` ids."""

    BOS, EOS, UNK = "<s>", "</s>", "<unk>"

    def __init__(self, words: Iterable[str] = ()):
        self._surfaces = [self.BOS, self.EOS, self.UNK]
        self._index = {s: i for i, s in enumerate(self._surfaces)}
        for w in words:
            if w not in self._index:
                self._index[w] = len(self._surfaces)
                self._surfaces.append(w)
        self.bos, self.eos, self.unk = 0, 1, 2
        self.is_punct = np.array(
            [i >= 3 and is_punct(s) for i, s in enumerate(self._surfaces)], dtype=bool
        )

    def __len__(self) -> int:
        return len(self._surfaces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._surfaces == other._surfaces

    def __repr__(self) -> str:
        return f"Vocabulary({self._surfaces[3:]!r})"

    @property
    def surfaces(self) -> list[str]:
        return list(self._surfaces)

    @property
    def reserved(self) -> tuple[int, int, int]:
        return (self.bos, self.eos, self.unk)

    def id(self, surface: str) -> int:
        return self._index.get(surface, self.unk)

    def surface(self, idx: int) -> str:
        return self._surfaces[idx]

    def words(self, ids: Sequence[int]) -> list[str]:
        """Surfaces of ``ids`` with the end-of-sentence marker dropped."""
        return [self._surfaces[i] for i in ids if i != self.eos]


class ScoringModel(Protocol):
    """Anything that returns next-token log-probabilities over the whole vocabulary.

    Implementations must be deterministic in ``(source, prefix)`` and safe
    for concurrent read-only calls.
    """

    def next_logprobs(self, source: Sentence, prefix: Sequence[int]) -> np.ndarray: ...


@dataclass(frozen=True)
class PenaltyConfig:
    alpha: float = 1.0
    length_exp: float = 0.0
    beam: int = 5
    max_len: int = 200

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InputError(f"alpha must be a positive finite number, got {self.alpha}")
        if not (self.length_exp >= 0 and math.isfinite(self.length_exp)):
            raise InputError(f"length_exp must be >= 0, got {self.length_exp}")
        if int(self.beam) != self.beam or self.beam < 1:
            raise InputError(f"beam must be a positive integer, got {self.beam}")
        if int(self.max_len) != self.max_len or self.max_len < 1:
            raise InputError(f"max_len must be a positive integer, got {self.max_len}")

    @property
    def log_alpha(self) -> float:
        return math.log(self.alpha)


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[int, ...]
    raw_logprob: float
    penalized_logprob: float
    copy_count: int
    score: float

    @property
    def complete_step(self) -> int:
        return len(self.tokens)

    def sort_key(self):
        return (-self.score, len(self.tokens), self.tokens)


def copy_mask(source: Sentence, vocab: Vocabulary) -> np.ndarray:
    """Boolean vector marking vocabulary ids that would copy a source word."""
    mask = np.zeros(len(vocab), dtype=bool)
    for tok in source.tokens:
        if tok.is_punct or tok.surface not in vocab:
            continue
        mask[vocab.id(tok.surface)] = True
    mask[list(vocab.reserved)] = False
    mask &= ~vocab.is_punct
    return mask


def apply_copy_penalty(logprobs: np.ndarray, mask: np.ndarray, alpha: float) -> np.ndarray:
    """Add ``ln(alpha)`` to the masked log-probabilities, without renormalizing."""
    logprobs = np.asarray(logprobs, dtype=float)
    if alpha == 1.0:
        return logprobs.copy()
    return np.where(mask, logprobs + math.log(alpha), logprobs)


def length_norm(length: int, length_exp: float) -> float:
    """GNMT length normalizer ``((5 + length) / 6) ** length_exp``."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return ((5.0 + length) / 6.0) ** length_exp


def _as_sentence(source) -> Sentence:
    if isinstance(source, Sentence):
        return source
    if isinstance(source, str):
        return Sentence.from_words(source.split())
    return Sentence.from_words(list(source))


def _scored(tokens, raw, count, config: PenaltyConfig) -> Hypothesis:
    penalized = raw + count * config.log_alpha
    return Hypothesis(
        tokens=tuple(tokens),
        raw_logprob=raw,
        penalized_logprob=penalized,
        copy_count=count,
        score=penalized / length_norm(len(tokens), config.length_exp),
    )


def _query(model, source, prefix, vocab_size) -> np.ndarray:
    lp = np.asarray(model.next_logprobs(source, list(prefix)), dtype=float)
    if lp.shape != (vocab_size,):
        raise ModelVocabMismatch(
            f"model returned {lp.shape[0] if lp.ndim == 1 else lp.shape} log-probs, "
            f"vocabulary has {vocab_size}"
        )
    return lp


def beam_search(model: ScoringModel, source, vocab: Vocabulary, config: PenaltyConfig) -> list[Hypothesis]:
    """Decode ``source`` and return the finished hypotheses, best first.

    Each step expands every live hypothesis over the vocabulary, keeps the
    ``config.beam`` best candidates by penalized log-probability and retires
    those ending in ``eos``. At ``max_len`` only ``eos`` may be emitted.
    Candidates whose step log-probability is at the floor are never expanded.
    Ranking is by length-normalized score, then earlier completion, then
    lexicographically smaller token ids.
    """
    source = _as_sentence(source)
    mask = copy_mask(source, vocab)
    V = len(vocab)
    eos = vocab.eos
    log_alpha = config.log_alpha
    live: list[tuple[tuple[int, ...], float, int]] = [((), 0.0, 0)]
    finished: list[Hypothesis] = []
    for t in range(config.max_len):
        last = t == config.max_len - 1
        candidates = []
        for tokens, raw, count in live:
            lp = _query(model, source, tokens, V)
            ids = (eos,) if last else np.flatnonzero(lp > LOGPROB_FLOOR)
            for v in ids:
                v = int(v)
                new_raw = raw + float(lp[v])
                new_count = count + int(mask[v])
                candidates.append((-(new_raw + new_count * log_alpha), tokens + (v,), new_raw, new_count))
        candidates.sort(key=lambda c: (c[0], c[1]))
        live = []
        for _, tokens, raw, count in candidates[: config.beam]:
            if tokens[-1] == eos:
                finished.append(_scored(tokens, raw, count, config))
            else:
                live.append((tokens, raw, count))
        if not live:
            break
    finished.sort(key=Hypothesis.sort_key)
    return finished


def exhaustive_decode(
    model: ScoringModel,
    source,
    vocab: Vocabulary,
    config: PenaltyConfig,
    max_len: Optional[int] = None,
) -> Hypothesis:
    """Best hypothesis over every eos-terminated sequence of length <= ``max_len``.

    Scoring and tie-breaking are the same as in :func:`beam_search`, so with a
    beam at least ``V ** max_len`` wide both return the same hypothesis.
    """
    source = _as_sentence(source)
    max_len = config.max_len if max_len is None else max_len
    V = len(vocab)
    if max_len < 1:
        raise InputError("max_len must be >= 1")
    if V**max_len > MAX_SEARCH_SPACE:
        raise SearchSpaceTooLarge(f"{V}**{max_len} sequences exceed {MAX_SEARCH_SPACE}")
    mask = copy_mask(source, vocab)
    eos = vocab.eos
    best: Optional[Hypothesis] = None

    def visit(tokens, raw, count):
        nonlocal best
        lp = _query(model, source, tokens, V)
        if len(tokens) == max_len - 1:
            ids = (eos,)
        else:
            ids = np.flatnonzero(lp > LOGPROB_FLOOR)
        for v in ids:
            v = int(v)
            new_raw = raw + float(lp[v])
            new_count = count + int(mask[v])
            if v == eos:
                hyp = _scored(tokens + (v,), new_raw, new_count, config)
                if best is None or hyp.sort_key() < best.sort_key():
                    best = hyp
            else:
                visit(tokens + (v,), new_raw, new_count)

    visit((), 0.0, 0)
    return best


def decode_corpus(
    model: ScoringModel,
    sources: Sequence,
    vocab: Vocabulary,
    config: PenaltyConfig,
    oracle: bool = False,
    n_jobs: Optional[int] = None,
) -> list[Hypothesis]:
    """Best hypothesis per source sentence, in input order."""

    def one(src):
        if oracle:
            return exhaustive_decode(model, src, vocab, config)
        return beam_search(model, src, vocab, config)[0]

    if n_jobs is None or n_jobs <= 1 or len(sources) < 2:
        return [one(s) for s in sources]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(one, sources))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    stats: CopyStats
    bleu: Optional[float]

    @property
    def ratio(self) -> float:
        return self.stats.ratio

    @property
    def cer(self) -> Optional[float]:
        return self.stats.cer


def penalty_sweep(
    model: ScoringModel,
    sources: Sequence[Sentence],
    references: Optional[Sequence[Sentence]],
    vocab: Vocabulary,
    config: PenaltyConfig,
    alphas: Sequence[float],
    oracle: bool = False,
    n_jobs: Optional[int] = None,
    lowercase: bool = False,
) -> list[SweepRow]:
    """Decode the corpus once per alpha and measure copying (and BLEU given references)."""
    sources = [_as_sentence(s) for s in sources]
    if references is not None:
        references = [_as_sentence(r) for r in references]
        if len(references) != len(sources):
            raise InputError(f"{len(references)} references for {len(sources)} sources")
    for a in alphas:
        if not a > 0:
            raise InputError(f"alpha must be positive, got {a}")
    rows = []
    for alpha in alphas:
        cfg = PenaltyConfig(alpha, config.length_exp, config.beam, config.max_len)
        best = decode_corpus(model, sources, vocab, cfg, oracle=oracle, n_jobs=n_jobs)
        hyps = [Sentence.from_words(vocab.words(h.tokens)) for h in best]
        corpus = Corpus(
            tuple(
                ParallelExample(src, hyp, None if references is None else references[i])
                for i, (src, hyp) in enumerate(zip(sources, hyps))
            )
        )
        bleu = None if references is None else corpus_bleu(hyps, references, lowercase=lowercase)
        rows.append(SweepRow(float(alpha), copy_stats(corpus, lowercase), bleu))
    return rows
