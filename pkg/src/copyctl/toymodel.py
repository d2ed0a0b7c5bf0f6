"""A lexicon-driven scoring model whose output space can be enumerated exactly.

Step ``t`` of decoding translates source word ``t``: the model returns the
lexicon distribution of that word (or all mass on ``<unk>`` for unknown
words) and, once every source word has been emitted, all mass on ``eos``.

Lexicon files have one entry per line::

    # comment
    Hussein<TAB>Hussein:0.6,X:0.4
    Tantawi → Tantawi:0.55, T:0.45
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .corpus import Sentence
from .decoder import LOGPROB_FLOOR, Vocabulary, _as_sentence
from .exceptions import BadDistribution, DuplicateEntry, LexiconFormatError, PrefixTooLong

SUM_TOLERANCE = 1e-6
_ARROW = re.compile(r"\s*(?:\t|→|->)\s*")


class LexiconModel:
    """Position-monotone word-for-word translation model.

    Parameters
    ----------
    lexicon : mapping
        Source word -> {target word: probability}. Each distribution must be
        strictly positive and sum to 1 within 1e-6; it is renormalized to
        machine precision on construction.
    vocab : Vocabulary, optional
        Defaults to the reserved ids plus every target word in lexicon order.
    """

    def __init__(self, lexicon: Mapping[str, Mapping[str, float]], vocab: Optional[Vocabulary] = None):
        self.lexicon = {w: _validated(w, dist) for w, dist in lexicon.items()}
        if vocab is None:
            vocab = Vocabulary(t for dist in self.lexicon.values() for t in dist)
        self.vocab = vocab
        missing = {t for dist in self.lexicon.values() for t in dist if t not in vocab}
        if missing:
            raise LexiconFormatError(f"target words missing from vocabulary: {sorted(missing)}")
        self._rows = {w: self._row(dist) for w, dist in self.lexicon.items()}
        self._unk_row = self._row({vocab.surface(vocab.unk): 1.0})
        self._eos_row = self._row({vocab.surface(vocab.eos): 1.0})
        for row in (*self._rows.values(), self._unk_row, self._eos_row):
            row.setflags(write=False)

    def _row(self, dist: Mapping[str, float]) -> np.ndarray:
        row = np.full(len(self.vocab), LOGPROB_FLOOR)
        for target, p in dist.items():
            row[self.vocab.id(target)] = math.log(p)
        return row

    def __repr__(self) -> str:
        return f"LexiconModel({len(self.lexicon)} entries, V={len(self.vocab)})"

    def next_logprobs(self, source, prefix: Sequence[int]) -> np.ndarray:
        source = _as_sentence(source)
        t = len(prefix)
        n = len(source)
        if t > n:
            raise PrefixTooLong(f"prefix of length {t} for a {n}-word source")
        if t == n:
            return self._eos_row
        return self._rows.get(source.tokens[t].surface, self._unk_row)

    def distribution(self, word: str) -> dict[str, float]:
        vocab = self.vocab
        return dict(self.lexicon.get(word, {vocab.surface(vocab.unk): 1.0}))


def _validated(word: str, dist: Mapping[str, float]) -> dict[str, float]:
    if not dist:
        raise BadDistribution(word, "empty distribution")
    probs = {}
    for target, p in dist.items():
        p = float(p)
        if not (p > 0 and math.isfinite(p)):
            raise BadDistribution(word, f"probability {p} for {target!r} is not positive")
        probs[target] = p
    total = math.fsum(probs.values())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise BadDistribution(word, f"probabilities sum to {total}")
    return {t: p / total for t, p in probs.items()}


def parse_lexicon(lines: Sequence[str]) -> dict[str, dict[str, float]]:
    lexicon: dict[str, dict[str, float]] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = _ARROW.split(line, maxsplit=1)
        if len(parts) != 2 or not parts[0]:
            raise LexiconFormatError(f"line {lineno}: expected 'word<TAB>target:prob,...'")
        word, rhs = parts
        if word in lexicon:
            raise DuplicateEntry(word)
        dist: dict[str, float] = {}
        for item in rhs.split(","):
            item = item.strip()
            target, sep, prob = item.rpartition(":")
            if not sep or not target:
                raise LexiconFormatError(f"line {lineno}: bad entry {item!r}")
            try:
                dist[target] = dist.get(target, 0.0) + float(prob)
            except ValueError:
                raise LexiconFormatError(f"line {lineno}: bad probability {prob!r}") from None
        lexicon[word] = dist
    return lexicon


def build_lexicon(spec_path) -> LexiconModel:
    """Read a lexicon file and return the validated model (its vocabulary is ``model.vocab``)."""
    text = Path(spec_path).read_text(encoding="utf-8")
    return LexiconModel(parse_lexicon(text.splitlines()))


def random_lexicon_model(
    rng: np.random.Generator,
    n_source_words: int = 3,
    max_options: int = 3,
    copy_prob: float = 0.5,
) -> tuple[LexiconModel, list[str]]:
    """Random lexicon where each source word may translate to itself.

    Returns the model and its source word list. Useful for property tests:
    vocabulary size is ``3 + number of distinct target words``.
    """
    source_words = [f"s{i}" for i in range(n_source_words)]
    targets = [f"t{i}" for i in range(max_options)]
    lexicon = {}
    for w in source_words:
        k = int(rng.integers(1, max_options + 1))
        options = list(rng.choice(targets, size=k, replace=False))
        if rng.random() < copy_prob:
            options[0] = w
        weights = rng.random(len(options)) + 0.05
        lexicon[w] = dict(zip(options, weights / weights.sum()))
    return LexiconModel(lexicon), source_words
