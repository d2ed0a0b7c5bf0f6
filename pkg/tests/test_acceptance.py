"""Acceptance criteria, one test per criterion.

Each test is tagged with ``@criterion(name)``; a pass/fail line per
criterion is printed at the end of the pytest run (see conftest.py).
"""

import json
import math
import time

import numpy as np
import pytest

from oracles import best_lexicon_output, brute_force_bleu, plain_beam_search
from sweep_fixture import SWEEP_ALPHAS, sweep_corpus

from copyctl.cli import main
from copyctl.corpus import tokenize
from copyctl.decoder import PenaltyConfig, beam_search, exhaustive_decode, penalty_sweep
from copyctl.metrics import corpus_bleu
from copyctl.toymodel import LexiconModel, random_lexicon_model

ALPHA_GRID = [0.5, 0.7, 1.0, 1.5, 2.0]


def criterion(name):
    return pytest.mark.criterion(name)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def random_instance(rng, max_vocab=8, max_source_len=5):
    """A random lexicon model with V <= max_vocab and a source sentence."""
    while True:
        model, words = random_lexicon_model(
            rng,
            n_source_words=int(rng.integers(1, 4)),
            max_options=int(rng.integers(1, 4)),
            copy_prob=0.7,
        )
        if len(model.vocab) <= max_vocab:
            break
    source = [str(w) for w in rng.choice(words, size=int(rng.integers(1, max_source_len + 1)))]
    return model, tokenize(" ".join(source)), source


def identity_suite():
    rng = np.random.default_rng(11)
    for _ in range(100):
        model, src, _ = random_instance(rng)
        cfg = PenaltyConfig(
            alpha=1.0,
            beam=int(rng.integers(1, 6)),
            max_len=len(src) + int(rng.integers(1, 3)),
            length_exp=float(rng.choice([0.0, 0.6, 1.4])),
        )
        yield model, src, cfg, beam_search(model, src, model.vocab, cfg)


def oracle_suite():
    rng = np.random.default_rng(12)
    n = 0
    while n < 100:
        model, src, _ = random_instance(rng)
        V = len(model.vocab)
        max_len = len(src) + 1
        if V**max_len > 10**5:
            continue
        n += 1
        cfg = PenaltyConfig(
            alpha=float(rng.choice(ALPHA_GRID)),
            beam=V**max_len,
            max_len=max_len,
            length_exp=float(rng.choice([0.0, 0.6, 1.4])),
        )
        yield model, src, cfg, beam_search(model, src, model.vocab, cfg), exhaustive_decode(model, src, model.vocab, cfg)


def monotone_suite():
    rng = np.random.default_rng(13)
    for _ in range(60):
        model, src, _ = random_instance(rng)
        yield [
            (a, exhaustive_decode(model, src, model.vocab, PenaltyConfig(alpha=a, max_len=len(src) + 1, length_exp=0.6)))
            for a in sorted(ALPHA_GRID)
        ]


@criterion("Metric fixtures")
def test_metric_fixtures(write, capsys):
    src = write("src.txt", ["a b c", "p q r", "m n o"])
    hyp = write("hyp.txt", ["a x c .", "p q s", "m u n"])
    ref = write("ref.txt", ["a y z", "p z", "m"])
    one = [write(f"one_{n}.txt", [line]) for n, line in (("src", "a b c"), ("hyp", "a x c ."), ("ref", "a y z"))]
    same = write("same.txt", ["the cat sat on the mat", "Hussein Tantawi was present ."])
    with Timer() as t:
        # the trio read as three files of one line, and a three-sentence extension with the same totals
        outs = []
        for files in (one, [src, hyp, ref]):
            assert main(["analyze", *map(str, files)]) == 0
            outs.append(capsys.readouterr().out)
        assert main(["analyze", str(same), str(same), str(same)]) == 0
        same_out = capsys.readouterr().out
    for out in outs:
        assert '"ratio": 0.666667' in out
        assert '"cer": 0.500000' in out
    rec = json.loads(same_out)
    assert (rec["ratio"], rec["cer"], rec["bleu"]) == (1.0, 0.0, 100.0)
    assert t.elapsed < 1.0


@criterion("Penalty identity")
def test_penalty_identity():
    with Timer() as t:
        for model, src, cfg, hyps in identity_suite():
            plain = plain_beam_search(
                model, src, len(model.vocab), model.vocab.eos, cfg.beam, cfg.max_len, cfg.length_exp
            )
            assert [(h.tokens, h.raw_logprob, h.score) for h in hyps] == plain
            for h in hyps:
                assert h.penalized_logprob == h.raw_logprob
    assert t.elapsed < 5.0


@criterion("Oracle agreement")
def test_oracle_agreement():
    with Timer() as t:
        for _, _, _, hyps, best in oracle_suite():
            assert hyps[0].tokens == best.tokens
            assert abs(hyps[0].score - best.score) <= 1e-12
    assert t.elapsed < 60.0


@criterion("Monotone copy count")
def test_monotone_copy_count():
    violations = 0
    instances = 0
    with Timer() as t:
        for row in monotone_suite():
            instances += 1
            counts = [h.copy_count for _, h in row]
            violations += sum(1 for a, b in zip(counts, counts[1:]) if b < a)
    assert instances >= 50
    assert violations == 0
    assert t.elapsed < 60.0


# frozen from tests/oracles.best_lexicon_output on sweep_corpus(): the copy wins
# exactly when 0.55 * alpha > 0.45, i.e. alpha > 0.818...
SWEEP_EXPECTED = {
    0.5: (0.0, None),
    0.7: (0.0, None),
    0.8: (0.0, None),
    0.9: (1.0, 20 / 28),
    1.0: (1.0, 20 / 28),
    1.2: (1.0, 20 / 28),
    1.5: (1.0, 20 / 28),
    2.0: (1.0, 20 / 28),
}


def sweep_oracle(lexicon, sources, references, alpha):
    copies = errors = total = 0
    for src, ref in zip(sources, references):
        out, _ = best_lexicon_output(lexicon, src, alpha)
        for w in out:
            total += 1
            if w in src:
                copies += 1
                errors += w not in ref
    return copies / total, (errors / copies if copies else None)


def non_decreasing(values):
    defined = [v for v in values if v is not None]
    # undefined CER means no copies at all, which can only happen below every defined point
    first = next((i for i, v in enumerate(values) if v is not None), len(values))
    return all(v is None for v in values[:first]) and all(v is not None for v in values[first:]) and defined == sorted(defined)


@criterion("Sweep shape")
def test_sweep_shape():
    lexicon, sources, references = sweep_corpus()
    for alpha in SWEEP_ALPHAS:
        ratio, cer = sweep_oracle(lexicon, sources, references, alpha)
        exp_ratio, exp_cer = SWEEP_EXPECTED[alpha]
        assert ratio == exp_ratio and (cer == exp_cer or cer is exp_cer is None)
    model = LexiconModel(lexicon)
    with Timer() as t:
        rows = penalty_sweep(
            model, sources, references, model.vocab, PenaltyConfig(beam=5, max_len=10, length_exp=0.6), SWEEP_ALPHAS
        )
    for row in rows:
        exp_ratio, exp_cer = SWEEP_EXPECTED[row.alpha]
        assert row.ratio == pytest.approx(exp_ratio, abs=1e-12)
        assert (row.cer is None) == (exp_cer is None)
        if exp_cer is not None:
            assert row.cer == pytest.approx(exp_cer, abs=1e-12)
    assert non_decreasing([r.ratio for r in rows])
    assert non_decreasing([r.cer for r in rows])
    assert t.elapsed < 30.0


@criterion("Score accounting")
def test_score_accounting():
    lexicon, sources, _ = sweep_corpus()
    sweep_model = LexiconModel(lexicon)
    decoded = []
    for *_, found in identity_suite():
        decoded.extend((1.0, h) for h in found)
    for _, _, cfg, found, best in oracle_suite():
        decoded.extend((cfg.alpha, h) for h in found + [best])
    for row in monotone_suite():
        decoded.extend(row)
    for alpha in SWEEP_ALPHAS:
        cfg = PenaltyConfig(alpha=alpha, beam=5, max_len=10, length_exp=0.6)
        for src in sources:
            decoded.extend((alpha, h) for h in beam_search(sweep_model, tokenize(" ".join(src)), sweep_model.vocab, cfg))
    assert len(decoded) > 1000
    for alpha, h in decoded:
        assert abs((h.penalized_logprob - h.raw_logprob) - h.copy_count * math.log(alpha)) <= 1e-12


@criterion("BLEU oracle")
def test_bleu_oracle():
    rng = np.random.default_rng(14)
    vocab = ["a", "b", "c", "d", "e", "."]
    for _ in range(20):
        n = int(rng.integers(1, 6))
        hyps = [" ".join(rng.choice(vocab, size=int(rng.integers(0, 9)))) for _ in range(n)]
        refs = [" ".join(rng.choice(vocab, size=int(rng.integers(0, 9)))) for _ in range(n)]
        for max_n in (1, 2, 3, 4):
            assert abs(corpus_bleu(hyps, refs, max_n) - brute_force_bleu(hyps, refs, max_n)) <= 1e-9


@criterion("Determinism")
def test_determinism(write, tmp_path):
    src = write("src.txt", ["Hussein war anwesend .", "Tantawi war", "a b c"])
    hyp = write("hyp.txt", ["Hussein was present .", "Tantawi was", "a x c ."])
    ref = write("ref.txt", ["Hussein was present .", "T was", "a y z"])
    pos = write("pos.txt", ["PROPN AUX ADJ PUNCT", "PROPN AUX", "X X X PUNCT"])
    meta = write("meta.txt", ["origin=src-ori", "origin=tgt-ori", "origin=src-ori"])
    ck1 = write("ck1.txt", ["Hussein war anwesend .", "Tantawi war", "a b c"])
    lex = write("lex.txt", ["Hussein\tHussein:0.6,X:0.4", "war\twas:0.9,war:0.1", "Tantawi\tTantawi:0.55,T:0.45"])
    dsrc = write("dsrc.txt", ["Hussein war", "Tantawi war Hussein"])
    dref = write("dref.txt", ["X was", "T was X"])
    commands = {
        "analyze": ["analyze", src, hyp, ref],
        "analyze-tsv": ["analyze", src, hyp, ref, "--format", "tsv"],
        "curve": ["curve", src, ref, ck1, hyp],
        "pos": ["pos", src, hyp, ref, pos],
        "group": ["group", src, hyp, ref, meta, "--key", "origin"],
        "decode": ["decode", lex, dsrc, "--alpha", "0.7"],
        "decode-oracle": ["decode", lex, dsrc, "--oracle", "--max-len", "4", "--format", "tsv"],
        "sweep": ["sweep", lex, dsrc, dref],
    }
    for name, argv in commands.items():
        outputs = []
        for run in range(2):
            out = tmp_path / f"{name}.{run}.out"
            extra = ["--scores", str(tmp_path / f"{name}.{run}.scores")] if argv[0] == "decode" else []
            assert main([str(a) for a in argv] + ["--out", str(out)] + extra) == 0, name
            outputs.append(out.read_bytes())
            if extra:
                outputs[-1] += (tmp_path / f"{name}.{run}.scores").read_bytes()
        assert outputs[0] == outputs[1], name
        assert outputs[0], name
