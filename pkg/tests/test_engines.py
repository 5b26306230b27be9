import dataclasses

import numpy as np
import pytest

from whmin.automorphisms import (
    apply,
    apply_sequence,
    count_whitehead,
    enumerate_whitehead,
    is_whitehead_minimal,
    random_whitehead,
)
from whmin.classifier import MINIMAL, decide
from whmin.engines import (
    CLASSIFIER,
    FULL_SWEEP,
    TRIVIAL,
    ConfigError,
    SearchConfig,
    hdwr,
    hpwr,
    reduce_word,
    wlr,
    wr,
)
from whmin.words import Word, WordError, random_cyclically_reduced_word


def certified_minimal(rank, length, rng):
    while True:
        w = random_cyclically_reduced_word(rank, length, rng)
        if is_whitehead_minimal(w):
            return w


def inflate(w, k, rng):
    for _ in range(k):
        w = apply(random_whitehead(w.rank, rng), w)
    return w


def primitive(rank, k, rng):
    return inflate(Word([int(rng.integers(1, rank + 1))], rank), k, rng)


def check_result(res):
    assert apply_sequence(res.applied, res.input) == res.output
    assert res.steps_reducing == len(res.applied) <= len(res.input)
    assert res.steps_reducing <= res.steps_total
    assert len(res.output) <= len(res.input)


def trace(engine, u, cfg=None):
    lengths = [len(u)]
    progress = lambda i, length, steps: lengths.append(length)
    if engine is wr:
        res = wr(u, progress)
    else:
        res = engine(u, dataclasses.replace(cfg, progress=progress))
    return res, lengths


# --- WLR / WR ----------------------------------------------------------------------------


def test_wlr_examples():
    assert wlr(Word.parse("x1", 3)) is None
    u = Word.parse("x1 X2 x1 X2", 2)
    t, image = wlr(u)
    assert len(image) == 2 and apply(t, u) == image
    # oracle: exhaustive sweep of all 12 automorphisms of W(F2)
    assert min(len(apply(s, u)) for s in enumerate_whitehead(2)) == 2


def test_wr_on_primitive():
    rng = np.random.default_rng(61)
    for _ in range(20):
        res = wr(primitive(3, 5, rng))
        assert len(res.output) == 1 and res.terminated_by == TRIVIAL
        check_result(res)


def test_wr_on_minimal_word():
    rng = np.random.default_rng(62)
    u = certified_minimal(3, 40, rng)
    res = wr(u)
    assert res.output == u and res.steps_reducing == 0
    assert res.steps_total == count_whitehead(3) and res.terminated_by == FULL_SWEEP


def test_wr_recovers_orbit_length():
    rng = np.random.default_rng(63)
    for _ in range(30):
        base = certified_minimal(3, int(rng.integers(5, 60)), rng)
        w = inflate(base, 1, rng)
        assert len(wr(w).output) == len(base)


def test_wr_is_idempotent_and_monotone():
    rng = np.random.default_rng(64)
    for _ in range(20):
        u = inflate(certified_minimal(3, 20, rng), 3, rng)
        res, lengths = trace(wr, u)
        assert all(a > b for a, b in zip(lengths, lengths[1:]))
        assert wr(res.output).steps_reducing == 0


def test_rejects_non_cyclically_reduced_input():
    with pytest.raises(WordError):
        wr(Word.parse("x1 x2 X1", 3))


def test_inflated_words_always_have_whitehead_reducer():
    rng = np.random.default_rng(65)
    for rank in (2, 3):
        done = 0
        while done < 100:
            base = certified_minimal(rank, int(rng.integers(3, 30)), rng)
            w = inflate(base, int(rng.integers(1, 4)), rng)
            if len(w) <= len(base):
                continue
            done += 1
            assert wlr(w) is not None


# --- HDWR ----------------------------------------------------------------------------------


def test_hdwr_matches_wr(model2, model3):
    rng = np.random.default_rng(66)
    models = {2: model2, 3: model3}
    for _ in range(300):
        rank = int(rng.integers(2, 4))
        u = random_cyclically_reduced_word(rank, int(rng.integers(2, 51)), rng)
        u = inflate(u, int(rng.integers(0, 3)), rng)
        res = hdwr(u, SearchConfig(wmin=models[rank], seed=1))
        check_result(res)
        assert len(res.output) == len(wr(u).output)


def test_hdwr_matches_wr_rank4_without_gate():
    rng = np.random.default_rng(67)
    cfg = SearchConfig(classifier_gate=False)
    for _ in range(40):
        u = inflate(random_cyclically_reduced_word(4, int(rng.integers(2, 30)), rng), 2, rng)
        assert len(hdwr(u, cfg).output) == len(wr(u).output)


def test_hdwr_minimal_classified_minimal_does_one_sweep(model3):
    rng = np.random.default_rng(68)
    while True:
        u = certified_minimal(3, int(rng.integers(100, 600)), rng)
        if decide(model3, u) == MINIMAL:
            break
    res = hdwr(u, SearchConfig(wmin=model3))
    assert res.steps_total == count_whitehead(3) and res.output == u


def test_hdwr_monotone_trace(model3):
    rng = np.random.default_rng(69)
    cfg = SearchConfig(wmin=model3, seed=2)
    for _ in range(20):
        res, lengths = trace(hdwr, primitive(3, 8, rng), cfg)
        assert all(a > b for a, b in zip(lengths, lengths[1:]))
        assert len(res.output) == 1


def test_hdwr_uses_fewer_steps_on_primitives(model3):
    rng = np.random.default_rng(70)
    words = [primitive(3, 10, rng) for _ in range(50)]
    cfg = SearchConfig(wmin=model3, seed=3)
    wr_steps = np.mean([wr(u).steps_total for u in words])
    hd_steps = np.mean([hdwr(u, cfg).steps_total for u in words])
    assert wr_steps > 2 * hd_steps


# --- HPWR ----------------------------------------------------------------------------------------


def test_hpwr_on_primitives(model3):
    rng = np.random.default_rng(71)
    cfg = SearchConfig(algorithm="hpwr", wmin=model3, seed=4)
    for _ in range(50):
        res, lengths = trace(hpwr, primitive(3, 10, rng), cfg)
        check_result(res)
        assert len(res.output) == 1
        assert all(a > b for a, b in zip(lengths, lengths[1:]))


def test_hpwr_stops_on_classifier(model3):
    rng = np.random.default_rng(72)
    while True:
        u = certified_minimal(3, 300, rng)
        if decide(model3, u) == MINIMAL:
            break
    res = hpwr(u, SearchConfig(wmin=model3))
    assert res.terminated_by == CLASSIFIER and res.output == u
    assert res.steps_total < count_whitehead(3)


def test_hpwr_no_swr_ends_when_fast_checks_fail(model3):
    rng = np.random.default_rng(73)
    for _ in range(20):
        u = inflate(certified_minimal(3, 100, rng), 2, rng)
        res = hpwr(u, SearchConfig(wmin=model3, use_swr=False))
        check_result(res)
        assert res.terminated_by in (CLASSIFIER, "swr-exhausted", TRIVIAL)


# --- configuration ------------------------------------------------------------------------------------


def test_config_errors(model3):
    u = Word.parse("x1 x2 x3 x2", 3)
    with pytest.raises(ConfigError):
        hdwr(u, SearchConfig())
    with pytest.raises(ConfigError):
        hpwr(u, SearchConfig(wmin=model3.with_centroids(None)))
    with pytest.raises(ConfigError):
        reduce_word(u, SearchConfig(algorithm="nope"))


def test_swr_default_only_for_large_ranks():
    cfg = SearchConfig()
    assert not cfg.swr_in_hdwr(5) and cfg.swr_in_hdwr(6)
    assert SearchConfig(enable_swr_in_hdwr=True).swr_in_hdwr(3)
    assert not SearchConfig(use_swr=False, enable_swr_in_hdwr=True).swr_in_hdwr(8)


def test_trivial_words(model3):
    for text in ("", "x2"):
        u = Word.parse(text, 3)
        for res in (wr(u), hdwr(u, SearchConfig(wmin=model3)), hpwr(u, SearchConfig(wmin=model3))):
            assert res.terminated_by == TRIVIAL and res.steps_total == 0 and res.output == u


def test_reduce_word_dispatch(model3):
    u = Word.parse("x1 x2 x1 x2 x3", 3)
    for algo in ("wr", "hdwr", "hpwr"):
        res = reduce_word(u, SearchConfig(algorithm=algo, wmin=model3, seed=5))
        assert len(res.output) == len(wr(u).output)
