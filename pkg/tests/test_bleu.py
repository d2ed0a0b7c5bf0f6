import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_bleu

from copyctl.corpus import tokenize
from copyctl.exceptions import LineCountMismatch
from copyctl.metrics import bleu_stats, corpus_bleu


def test_identical_corpus_is_100():
    refs = ["the cat sat on the mat", "Hussein Tantawi was present ."]
    assert corpus_bleu(refs, refs) == 100.0


def test_clipping_case():
    assert corpus_bleu(["the the the the"], ["the cat"]) == 0.0
    stats = bleu_stats(["the the the the"], ["the cat"])
    assert stats.matches[0] == 1 and stats.totals[0] == 4
    assert corpus_bleu(["the the the the"], ["the cat"], max_n=1) == 25.0


def test_two_sentence_fixture():
    hyps, refs = ["the cat sat", "a b"], ["the cat sat", "c d"]
    # frozen from brute_force_bleu: no 4-grams at all, so BLEU-4 is 0;
    # BLEU-3 = 100 * (3/5 * 2/3 * 1/1) ** (1/3)
    assert corpus_bleu(hyps, refs) == 0.0
    assert corpus_bleu(hyps, refs, max_n=3) == pytest.approx(73.68062997280774, abs=1e-9)
    assert corpus_bleu(hyps, refs, max_n=3) == pytest.approx(brute_force_bleu(hyps, refs, 3), abs=1e-9)


def test_brevity_penalty():
    s = bleu_stats(["a b"], ["a b c d"], max_n=1)
    assert s.brevity_penalty == pytest.approx(math.exp(1 - 4 / 2))
    assert corpus_bleu(["a b"], ["a b c d"], max_n=1) == pytest.approx(100 * math.exp(-1))


def test_empty_hypotheses():
    assert corpus_bleu(["", ""], ["a", "b"]) == 0.0


def test_accepts_sentences_and_token_lists():
    h = ["a b c d e"]
    r = ["a b c d f"]
    expected = corpus_bleu(h, r)
    assert corpus_bleu([tokenize(h[0])], [tokenize(r[0])]) == expected
    assert corpus_bleu([h[0].split()], [r[0].split()]) == expected


def test_length_mismatch():
    with pytest.raises(LineCountMismatch):
        corpus_bleu(["a"], ["a", "b"])


@pytest.mark.parametrize("seed", range(20))
def test_random_micro_corpora_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    vocab = ["a", "b", "c", "d", "."]
    n = int(rng.integers(1, 6))
    hyps = [" ".join(rng.choice(vocab, size=int(rng.integers(0, 9)))) for _ in range(n)]
    refs = [" ".join(rng.choice(vocab, size=int(rng.integers(0, 9)))) for _ in range(n)]
    for max_n in (1, 2, 4):
        assert abs(corpus_bleu(hyps, refs, max_n) - brute_force_bleu(hyps, refs, max_n)) <= 1e-9


pairs = st.lists(
    st.tuples(
        st.lists(st.sampled_from("abcd"), min_size=0, max_size=8),
        st.lists(st.sampled_from("abcd"), min_size=0, max_size=8),
    ),
    min_size=1,
    max_size=5,
)


@settings(max_examples=200, deadline=None)
@given(pairs, st.randoms(use_true_random=False))
def test_bleu_properties(ps, rnd):
    hyps = [" ".join(h) for h, _ in ps]
    refs = [" ".join(r) for _, r in ps]
    score = corpus_bleu(hyps, refs)
    assert 0.0 <= score <= 100.0
    assert abs(score - brute_force_bleu(hyps, refs)) <= 1e-9
    order = list(range(len(ps)))
    rnd.shuffle(order)
    assert corpus_bleu([hyps[i] for i in order], [refs[i] for i in order]) == score
    # h vs h is 100 as soon as every n-gram order has something to match
    if any(len(h) >= 4 for h, _ in ps):
        assert corpus_bleu(hyps, hyps) == 100.0
