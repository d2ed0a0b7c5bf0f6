"""Copying metrics over a parallel corpus.

A hypothesis word is a *copy* when the same word form occurs anywhere in its
source sentence. Punctuation is never a copy and, unless
``keep_punct_denominator`` is set, is not counted in the denominator either.

* copying ratio = copies / hypothesis words
* copying error rate (CER) = copies absent from the reference / copies
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import Corpus, ParallelExample, Sentence, Token, load_parallel
from .exceptions import EmptyCorpus, InputError, LineCountMismatch, MissingMeta, MissingPos

DEFAULT_POS_BUCKETS = ("PROPN", "ADP", "NUM", "NOUN")
OTHERS = "Others"


@dataclass(frozen=True)
class CopyStats:
    copy_tokens: int = 0
    total_tokens: int = 0
    copy_errors: Optional[int] = 0

    def __post_init__(self):
        if not 0 <= self.copy_tokens <= self.total_tokens:
            raise ValueError(f"inconsistent counts: {self}")
        if self.copy_errors is not None and not 0 <= self.copy_errors <= self.copy_tokens:
            raise ValueError(f"inconsistent counts: {self}")

    @property
    def ratio(self) -> float:
        return self.copy_tokens / self.total_tokens if self.total_tokens else 0.0

    @property
    def cer(self) -> Optional[float]:
        """None when there are no copies or no references to check them against."""
        if self.copy_errors is None or self.copy_tokens == 0:
            return None
        return self.copy_errors / self.copy_tokens

    def __add__(self, other: "CopyStats") -> "CopyStats":
        errors = (
            None
            if self.copy_errors is None or other.copy_errors is None
            else self.copy_errors + other.copy_errors
        )
        return CopyStats(
            self.copy_tokens + other.copy_tokens,
            self.total_tokens + other.total_tokens,
            errors,
        )

    def to_dict(self) -> dict:
        return {
            "copy_tokens": self.copy_tokens,
            "total_tokens": self.total_tokens,
            "copy_errors": self.copy_errors,
            "ratio": self.ratio,
            "cer": self.cer,
        }


@dataclass(frozen=True)
class BucketedStats:
    buckets: Mapping[str, CopyStats]
    total: CopyStats


@dataclass(frozen=True)
class CurvePoint:
    label: str
    stats: CopyStats


def _norm(surface: str, lowercase: bool) -> str:
    return surface.lower() if lowercase else surface


def word_set(sentence: Sentence, lowercase: bool = False) -> frozenset[str]:
    """Non-punctuation word forms of ``sentence``."""
    return frozenset(_norm(t.surface, lowercase) for t in sentence.tokens if not t.is_punct)


def is_copy_token(token: Token, source_words: Iterable[str], lowercase: bool = False) -> bool:
    """Whether ``token`` is copied from a source with word set ``source_words``.

    ``source_words`` should already be lowercased when ``lowercase`` is set;
    :func:`word_set` does that.
    """
    if token.is_punct:
        return False
    return _norm(token.surface, lowercase) in source_words


def _copy_flags(example: ParallelExample, lowercase: bool):
    """Yield (token_index, is_error) for each copy token; is_error is None without a reference."""
    src = word_set(example.source, lowercase)
    ref = None if example.reference is None else word_set(example.reference, lowercase)
    for i, tok in enumerate(example.hypothesis.tokens):
        if is_copy_token(tok, src, lowercase):
            err = None if ref is None else _norm(tok.surface, lowercase) not in ref
            yield i, err


def _denominator(sentence: Sentence, keep_punct_denominator: bool) -> int:
    if keep_punct_denominator:
        return len(sentence)
    return sum(1 for t in sentence.tokens if not t.is_punct)


def sentence_stats(
    example: ParallelExample, lowercase: bool = False, keep_punct_denominator: bool = False
) -> CopyStats:
    flags = list(_copy_flags(example, lowercase))
    errors = None if example.reference is None else sum(1 for _, e in flags if e)
    return CopyStats(len(flags), _denominator(example.hypothesis, keep_punct_denominator), errors)


def copy_stats(
    corpus: Corpus, lowercase: bool = False, keep_punct_denominator: bool = False
) -> CopyStats:
    """Corpus-level copy counts; errors are counted only if every example has a reference."""
    if len(corpus) == 0:
        raise EmptyCorpus("corpus has no sentences")
    total = CopyStats()
    for ex in corpus:
        total = total + sentence_stats(ex, lowercase, keep_punct_denominator)
    return total


def sentence_overlap(example: ParallelExample, lowercase: bool = False) -> float:
    """Fraction of the hypothesis' non-punctuation words that are copies."""
    s = sentence_stats(example, lowercase)
    return s.ratio


def count_high_overlap(corpus: Corpus, threshold: float = 0.5, lowercase: bool = False) -> int:
    """Number of sentences whose overlap strictly exceeds ``threshold``."""
    return sum(1 for ex in corpus if sentence_overlap(ex, lowercase) > threshold)


def bucket_by_pos(
    corpus: Corpus,
    coarse_map: Optional[Mapping[str, str]] = None,
    lowercase: bool = False,
    keep_punct_denominator: bool = False,
) -> BucketedStats:
    """Split copy tokens into POS buckets.

    Every bucket keeps the corpus-wide word count as its denominator, so the
    bucket ratios add up to the total ratio. Each bucket's CER only looks at
    the copies that fall into it. Tags missing from ``coarse_map`` go to
    ``"Others"``; the default map keeps PROPN, ADP, NUM and NOUN.
    """
    if coarse_map is None:
        coarse_map = {tag: tag for tag in DEFAULT_POS_BUCKETS}
    names = list(dict.fromkeys(list(coarse_map.values()) + [OTHERS]))
    has_refs = corpus.has_references
    copies = Counter()
    errors = Counter()
    for lineno, ex in enumerate(corpus, 1):
        if ex.pos_tags is None:
            raise MissingPos(f"sentence {lineno} has no POS tags")
        for i, err in _copy_flags(ex, lowercase):
            bucket = coarse_map.get(ex.pos_tags[i], OTHERS)
            copies[bucket] += 1
            errors[bucket] += bool(err)
    total = copy_stats(corpus, lowercase, keep_punct_denominator)
    buckets = {
        name: CopyStats(copies[name], total.total_tokens, errors[name] if has_refs else None)
        for name in names
    }
    return BucketedStats(buckets, total)


def group_by_key(
    corpus: Corpus, meta_key: str, lowercase: bool = False, keep_punct_denominator: bool = False
) -> dict[str, CopyStats]:
    """Copy statistics per value of ``meta_key``, keys sorted."""
    groups: dict[str, list[ParallelExample]] = {}
    for lineno, ex in enumerate(corpus, 1):
        if meta_key not in ex.meta:
            raise MissingMeta(meta_key, lineno)
        groups.setdefault(ex.meta[meta_key], []).append(ex)
    return {
        value: copy_stats(Corpus(tuple(exs)), lowercase, keep_punct_denominator)
        for value, exs in sorted(groups.items())
    }


def learning_curve(
    source_path,
    reference_path,
    hypothesis_paths: Sequence,
    lowercase: bool = False,
    keep_punct_denominator: bool = False,
    merge_subwords: bool = False,
) -> list[CurvePoint]:
    """One point per checkpoint output file, labelled by file stem, in the given order."""
    points = []
    seen = set()
    for path in hypothesis_paths:
        label = Path(path).stem
        if label in seen:
            raise InputError(f"duplicate curve label {label!r} ({path})")
        seen.add(label)
        corpus = load_parallel(source_path, path, reference_path, merge_subwords=merge_subwords)
        points.append(CurvePoint(label, copy_stats(corpus, lowercase, keep_punct_denominator)))
    return points


def _as_words(item, lowercase: bool) -> list[str]:
    if isinstance(item, Sentence):
        words = item.words
    elif isinstance(item, str):
        words = item.split()
    else:
        words = list(item)
    return [w.lower() for w in words] if lowercase else words


def _ngrams(words: Sequence[str], n: int) -> Counter:
    return Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


@dataclass(frozen=True)
class BleuStats:
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    hyp_len: int
    ref_len: int
    precisions: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "precisions", tuple(m / t if t else 0.0 for m, t in zip(self.matches, self.totals))
        )

    @property
    def brevity_penalty(self) -> float:
        if self.hyp_len == 0:
            return 0.0
        return math.exp(min(0.0, 1.0 - self.ref_len / self.hyp_len))

    @property
    def score(self) -> float:
        if self.hyp_len == 0 or any(m == 0 for m in self.matches):
            return 0.0
        log_p = math.fsum(math.log(m / t) for m, t in zip(self.matches, self.totals))
        return 100.0 * self.brevity_penalty * math.exp(log_p / len(self.matches))


def bleu_stats(hypotheses, references, max_n: int = 4, lowercase: bool = False) -> BleuStats:
    hypotheses = list(hypotheses)
    references = list(references)
    if len(hypotheses) != len(references):
        raise LineCountMismatch("<references>", len(hypotheses), len(references))
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h = _as_words(hyp, lowercase)
        r = _as_words(ref, lowercase)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            hc = _ngrams(h, n)
            rc = _ngrams(r, n)
            matches[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            totals[n - 1] += max(len(h) - n + 1, 0)
    return BleuStats(tuple(matches), tuple(totals), hyp_len, ref_len)


def corpus_bleu(hypotheses, references, max_n: int = 4, lowercase: bool = False) -> float:
    """Unsmoothed corpus BLEU in [0, 100] with a single reference per sentence.

    Items may be :class:`Sentence` objects, whitespace-tokenized strings or
    lists of words.
    """
    return bleu_stats(hypotheses, references, max_n, lowercase).score
