import numpy as np
import pytest

from whmin import kernels
from whmin.automorphisms import apply, count_nielsen, enumerate_nielsen, is_whitehead_minimal, random_whitehead
from whmin.features import edge_list, feature_dim, feature_vector
from whmin.genetic import default_density
from whmin.heuristics import (
    CentroidModel,
    TrainingError,
    centroid_order,
    edge_reducers,
    inner_twins,
    max_edge_order,
    nielsen_first_order,
    nielsen_reducers,
    train_centroids,
)
from whmin.words import RankMismatch, Word, WordError, is_rotation, random_cyclically_reduced_word


def inflated_words(rank, count, seed, lo=50, hi=500, cap=1000):
    """Minimal words under one length-increasing random Whitehead automorphism."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        base = random_cyclically_reduced_word(rank, int(rng.integers(lo, hi + 1)), rng)
        if rank <= 4 and not is_whitehead_minimal(base):
            continue
        w = apply(random_whitehead(rank, rng, default_density(rank)), base)
        if len(base) < len(w) <= cap:
            out.append(w)
    return out


def random_centroids(rank, seed=0):
    rng = np.random.default_rng(seed)
    c = rng.random((count_nielsen(rank), feature_dim(rank)))
    c /= c.sum(axis=1, keepdims=True)
    return CentroidModel(rank, c, np.full(count_nielsen(rank), 50), 100)


def test_nielsen_first():
    order = nielsen_first_order(3)
    assert len(order) == 24 and order.indices[0] == 0
    assert np.array_equal(order.indices, nielsen_first_order(3).indices)
    assert order.auts == list(enumerate_nielsen(3))


def test_max_edge_example_f2():
    u = Word.parse("x1 X2 x1 X2", 2)
    order = max_edge_order(u)
    # oracle: which of the 8 Nielsen maps shorten u, found by applying all of them
    reducers = {t for t in enumerate_nielsen(2) if len(apply(t, u)) < len(u)}
    assert reducers
    first_pair = order.auts[:2]
    assert any(t in reducers for t in first_pair)
    assert min(len(apply(t, u)) for t in first_pair) == 2


def test_max_edge_pair_belongs_to_heaviest_edge(rng):
    for _ in range(100):
        u = random_cyclically_reduced_word(3, int(rng.integers(2, 60)), rng)
        counts = kernels.edge_counts(u.letters, 3, True)
        red = edge_reducers(3)
        usable = red[:, 0] >= 0
        best = np.flatnonzero(usable & (counts == counts[usable].max()))[0]
        assert set(max_edge_order(u).indices[:2].tolist()) == set(red[best].tolist())


def test_edge_reducers_shorten_their_edge():
    # the pair for {p, q} maps p -> p q and q -> q p
    red = edge_reducers(3)
    table = enumerate_nielsen(3)
    for e, (p, q) in enumerate(edge_list(3)):
        if abs(p) == abs(q):
            assert (red[e] == -1).all()
            continue
        u = Word([p, -q], 3)
        for i in red[e]:
            assert len(apply(table[i], u)) < len(u)


def test_orderings_emit_each_candidate_once(rng, model3):
    for _ in range(50):
        u = random_cyclically_reduced_word(3, int(rng.integers(2, 100)), rng)
        for order in (max_edge_order(u), centroid_order(u, model3.centroids), nielsen_first_order(3)):
            idx = order.indices.tolist()
            assert len(idx) == len(set(idx)) and all(0 <= i < 24 for i in idx)


def test_max_edge_rejects_short_words():
    with pytest.raises(WordError):
        max_edge_order(Word.parse("x1", 2))


def test_centroid_order_basics(rng):
    model = random_centroids(3)
    u = random_cyclically_reduced_word(3, 40, rng)
    order = centroid_order(u, model)
    assert len(order) == 24
    assert (np.diff(order.scores) >= 0).all()
    excluded = centroid_order(u, model, exclude=order.indices[:2])
    assert len(excluded) == 22 and not set(order.indices[:2]) & set(excluded.indices)
    assert len(centroid_order(u, model, exclude=[enumerate_nielsen(3)[5]])) == 23


def test_centroid_exact_match_is_first():
    u = Word.parse("x1 x2 X3 x2 x2 x1", 3)
    model = random_centroids(3)
    cents = model.centroids.copy()
    cents[7] = feature_vector(u)
    order = centroid_order(u, CentroidModel(3, cents, model.sample_counts, 100))
    assert order.indices[0] == 7 and order.scores[0] == 0.0


def test_centroid_rank_mismatch():
    with pytest.raises(RankMismatch):
        centroid_order(Word.parse("x1 x2", 2), random_centroids(3))


def test_trained_centroid_shape(model3):
    c = model3.centroids
    assert c.centroids.shape == (24, 15)
    assert ((0 <= c.centroids) & (c.centroids <= 1)).all()
    assert np.allclose(c.centroids.sum(axis=1), 1.0)
    assert (c.sample_counts >= 50).all()


def test_rank2_training_samples_have_unique_reducer():
    seen = []
    model = train_centroids(2, max_length=200, seed=3, on_sample=lambda i, w: seen.append((i, w)))
    assert len(model.centroids) == 8 and len(seen) >= 8 * 50
    table = enumerate_nielsen(2)
    for i, w in seen:
        lengths = [len(apply(t, w)) for t in table]
        assert lengths[i] < len(w)
        # the only other reducer allowed is the inner twin (same map up to conjugation)
        others = {j for j, L in enumerate(lengths) if L < len(w)} - {i}
        assert others == {int(inner_twins(2)[i])}


def test_inner_twins_reduce_identically(rng):
    twins = inner_twins(2)
    table = enumerate_nielsen(2)
    assert sorted(twins.tolist()) == list(range(8))
    for _ in range(100):
        w = random_cyclically_reduced_word(2, int(rng.integers(2, 50)), rng)
        for i, j in enumerate(twins):
            assert is_rotation(apply(table[i], w), apply(table[j], w))
    assert (inner_twins(3) == -1).all()


def test_training_starvation_raises():
    with pytest.raises(TrainingError):
        train_centroids(3, max_length=60, seed=1, budget=100)


def test_centroid_json_round_trip(model3):
    c = model3.centroids
    back = CentroidModel.from_json(c.to_json(), 3, c.max_length)
    assert np.array_equal(back.centroids, c.centroids)
    assert np.array_equal(back.sample_counts, c.sample_counts)


def test_centroid_reducer_within_three(model3):
    words = inflated_words(3, 1000, seed=31)
    hits = 0
    for w in words:
        pos, _ = centroid_order(w, model3.centroids).first_reducing(w)
        hits += 0 <= pos < 3
    assert hits >= 0.95 * len(words)


def test_max_edge_pair_reduces_most_inflated_words():
    words = inflated_words(3, 500, seed=32, lo=100, hi=500)
    hits = sum(max_edge_order(w).head(2).first_reducing(w)[0] >= 0 for w in words)
    assert hits >= 0.85 * len(words)


def test_nielsen_reducers_match_bruteforce(rng):
    table = enumerate_nielsen(3)
    for _ in range(30):
        w = random_cyclically_reduced_word(3, int(rng.integers(2, 40)), rng)
        expected = [i for i, t in enumerate(table) if len(apply(t, w)) < len(w)]
        assert nielsen_reducers(w).tolist() == expected


def test_candidate_cost_scaling():
    length = 200
    edge_costs, cent_costs = {}, {}
    for n in range(3, 9):
        u = random_cyclically_reduced_word(n, length, n)
        edge_costs[n] = max_edge_order(u).cost
        cent_costs[n] = centroid_order(u, random_centroids(n)).cost
    # bounded ratio to n^2 (resp. n^4) at fixed |w| means at most that growth
    edge_norm = [(edge_costs[n] - length) / n**2 for n in edge_costs]
    cent_norm = [(cent_costs[n] - length) / n**4 for n in cent_costs]
    assert max(edge_norm) <= 2 * min(edge_norm) and max(edge_norm) <= 2
    assert max(cent_norm) <= 2 * min(cent_norm) and max(cent_norm) <= 8
