"""Candidate orderings of Nielsen automorphisms.

Three heuristics order N(X) for the search for a length-reducing
automorphism:

* Nielsen-First: the fixed enumeration order, independent of the word.
* Maximal-Edge: for each Whitehead-graph edge ``{p, q}`` (distinct
  generators) in decreasing weight, the two automorphisms ``p -> p q`` and
  ``q -> q p`` that shorten the subwords counted by that edge.
* Centroid: increasing Euclidean distance between the word's feature vector
  and the mean feature vector of words reducible by exactly one Nielsen
  automorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Collection, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .automorphisms import (
    NielsenAut,
    apply,
    count_nielsen,
    enumerate_nielsen,
    is_whitehead_minimal,
    nielsen_tables,
    parse_automorphism,
    random_whitehead,
)
from .features import edge_list, feature_dim, feature_vector
from .genetic import default_density
from .words import RankMismatch, SeedLike, Word, WordError, random_cyclically_reduced_word, rng_from


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class OrderedCandidates:
    """Nielsen automorphisms (as enumeration indices) with heuristic scores.

    ``cost`` counts the elementary operations spent building the order.
    """

    rank: int
    indices: np.ndarray
    scores: np.ndarray
    cost: int = 0

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    @property
    def auts(self) -> List[NielsenAut]:
        table = enumerate_nielsen(self.rank)
        return [table[i] for i in self.indices]

    @property
    def items(self) -> List[Tuple[NielsenAut, float]]:
        return list(zip(self.auts, self.scores.tolist()))

    def head(self, k: int) -> "OrderedCandidates":
        return OrderedCandidates(self.rank, self.indices[:k], self.scores[:k], self.cost)

    def first_reducing(self, u: Word) -> Tuple[int, int]:
        """``(position, steps)`` of the first candidate that shortens ``u``."""
        imgs, lens = nielsen_tables(self.rank)
        pos, steps = kernels.first_reducing(u.letters, imgs, lens, self.indices, len(u))
        return int(pos), int(steps)


@lru_cache(maxsize=None)
def nielsen_position(rank: int) -> Dict[NielsenAut, int]:
    return {t: i for i, t in enumerate(enumerate_nielsen(rank))}


def _letter_maps_to(p: int, q: int) -> NielsenAut:
    # letter p -> p q, written as an action on the generator |p|
    if p > 0:
        return NielsenAut(p, q, "right")
    return NielsenAut(-p, -q, "left")


@lru_cache(maxsize=None)
def edge_reducers(rank: int) -> np.ndarray:
    """``(d, 2)`` Nielsen indices reducing each edge; ``-1`` rows for ``{x, X}``."""
    pos = nielsen_position(rank)
    out = np.full((feature_dim(rank), 2), -1, dtype=np.int64)
    for e, (p, q) in enumerate(edge_list(rank)):
        if abs(p) != abs(q):
            out[e] = pos[_letter_maps_to(p, q)], pos[_letter_maps_to(q, p)]
    out.flags.writeable = False
    return out


def nielsen_first_order(rank: int) -> OrderedCandidates:
    n = count_nielsen(rank)
    idx = np.arange(n)
    return OrderedCandidates(rank, idx, idx.astype(float), 0)


def _dedupe(indices: np.ndarray, scores: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    _, first = np.unique(indices, return_index=True)
    keep = np.sort(first)
    return indices[keep], scores[keep]


def max_edge_order(u: Word) -> OrderedCandidates:
    """Reducer pairs of the edges sorted by decreasing weight (ties by edge index)."""
    if len(u) < 2:
        raise WordError("the maximal-edge heuristic needs a word of length >= 2")
    counts = kernels.edge_counts(u.letters, u.rank, True)
    reducers = edge_reducers(u.rank)
    edges = np.nonzero(reducers[:, 0] >= 0)[0]
    edges = edges[np.argsort(-counts[edges], kind="stable")]
    idx = reducers[edges].ravel()
    scores = np.repeat(counts[edges] / len(u), 2)
    idx, scores = _dedupe(idx, scores)
    return OrderedCandidates(u.rank, idx, scores, len(u) + counts.shape[0])


# --- centroid model ---------------------------------------------------------


@dataclass(frozen=True)
class CentroidModel:
    rank: int
    centroids: np.ndarray  # (|N|, d), row i belongs to enumerate_nielsen(rank)[i]
    sample_counts: np.ndarray
    max_length: int

    @property
    def auts(self) -> Tuple[NielsenAut, ...]:
        return enumerate_nielsen(self.rank)

    def to_json(self) -> List[dict]:
        return [
            {"aut": str(t), "count": int(c), "vector": [float(x) for x in v]}
            for t, c, v in zip(self.auts, self.sample_counts, self.centroids)
        ]

    @classmethod
    def from_json(cls, entries: Sequence[dict], rank: int, max_length: int = 0) -> "CentroidModel":
        pos = nielsen_position(rank)
        d = feature_dim(rank)
        cents = np.full((len(pos), d), np.nan)
        counts = np.zeros(len(pos), dtype=np.int64)
        for e in entries:
            t = parse_automorphism(e["aut"], rank)
            if t not in pos:
                raise ValueError(f"centroid entry {e['aut']!r} is not a Nielsen automorphism of rank {rank}")
            vec = np.asarray(e["vector"], dtype=float)
            if vec.shape != (d,):
                raise ValueError(f"centroid for {e['aut']} has dimension {vec.shape}, expected {d}")
            cents[pos[t]] = vec
            counts[pos[t]] = int(e["count"])
        if np.isnan(cents).any():
            raise ValueError("centroid list does not cover every Nielsen automorphism")
        return cls(rank, cents, counts, max_length)


def centroid_order(u: Word, model: CentroidModel, exclude: Collection = ()) -> OrderedCandidates:
    """N(X) minus ``exclude`` by increasing distance to the class centroids.

    ``exclude`` may hold NielsenAut values or enumeration indices.
    """
    if model.rank != u.rank:
        raise RankMismatch(f"centroid model has rank {model.rank}, word has rank {u.rank}")
    f = feature_vector(u)
    dist = np.sqrt(((model.centroids - f) ** 2).sum(axis=1))
    keep = np.ones(dist.shape[0], dtype=bool)
    if len(exclude):
        pos = nielsen_position(u.rank)
        drop = [pos[t] if isinstance(t, NielsenAut) else int(t) for t in exclude]
        keep[drop] = False
    idx = np.nonzero(keep)[0]
    idx = idx[np.argsort(dist[idx], kind="stable")]
    return OrderedCandidates(u.rank, idx, dist[idx], len(u) + dist.shape[0] * f.shape[0])


@lru_cache(maxsize=None)
def inner_twins(rank: int) -> np.ndarray:
    """Index of the Nielsen map differing from each one by an inner automorphism, or -1.

    Only rank 2 has such pairs: ``x -> yx`` is ``x -> xy`` followed by
    conjugation by ``y``, which also fixes ``y``.  Twins shorten exactly the
    same cyclic words.
    """
    out = np.full(count_nielsen(rank), -1, dtype=np.int64)
    if rank == 2:
        pos = nielsen_position(rank)
        for t, i in pos.items():
            other = "left" if t.side == "right" else "right"
            out[i] = pos[NielsenAut(t.target, t.multiplier, other)]
    out.flags.writeable = False
    return out


def nielsen_reducers(w: Word) -> np.ndarray:
    """Enumeration indices of every Nielsen automorphism shortening ``w``."""
    imgs, lens = nielsen_tables(w.rank)
    lengths = kernels.image_lengths(w.letters, imgs, lens, np.arange(imgs.shape[0]))
    return np.nonzero(lengths < len(w))[0]


def train_centroids(
    rank: int,
    max_length: int = 400,
    samples_per_class: int = 50,
    seed: SeedLike = None,
    oracle: Optional[Callable[[Word], bool]] = None,
    *,
    min_length: int = 10,
    certify: Optional[bool] = None,
    density: Optional[float] = None,
    inflations_per_base: int = 4,
    budget: Optional[int] = None,
    on_sample: Optional[Callable[[int, Word], None]] = None,
) -> CentroidModel:
    """Estimate the mean feature vector of words reducible by exactly one Nielsen map.

    In rank 2 "exactly one" is read up to :func:`inner_twins`, since twins
    always reduce together.

    Words are built by applying one random length-increasing Whitehead
    automorphism to a minimal candidate of length at most ``max_length // 2``.
    Candidates are certified with ``oracle`` (default: exhaustive sweep when
    ``certify``, which itself defaults to ``rank <= 4``).  ``on_sample`` is
    called with ``(class index, word)`` for every accumulated word.
    """
    if samples_per_class < 50:
        raise ValueError("samples_per_class must be at least 50")
    if max_length // 2 < min_length:
        raise ValueError("max_length is too small for the minimum base length")
    if certify is None:
        certify = rank <= 4
    if density is None:
        density = default_density(rank)
    if oracle is None and certify:
        oracle = is_whitehead_minimal
    rng = rng_from(seed)
    n_classes = count_nielsen(rank)
    d = feature_dim(rank)
    sums = np.zeros((n_classes, d))
    counts = np.zeros(n_classes, dtype=np.int64)
    if budget is None:
        budget = 400 * n_classes * samples_per_class
    twins = inner_twins(rank)
    attempts = 0
    while counts.min() < samples_per_class and attempts < budget:
        base = random_cyclically_reduced_word(rank, int(rng.integers(min_length, max_length // 2 + 1)), rng)
        if oracle is not None and not oracle(base):
            continue
        for _ in range(inflations_per_base):
            attempts += 1
            w = apply(random_whitehead(rank, rng, density), base)
            if not len(base) < len(w) <= max_length:
                continue
            red = nielsen_reducers(w)
            # one reducer, or (rank 2) one reducer together with its inner twin
            if red.size == 1 or (red.size == 2 and twins[red[0]] == red[1]):
                f = feature_vector(w)
                for i in red:
                    sums[i] += f
                    counts[i] += 1
                    if on_sample is not None:
                        on_sample(int(i), w)
    starved = np.nonzero(counts < samples_per_class)[0]
    if starved.size:
        names = ", ".join(str(enumerate_nielsen(rank)[i]) for i in starved[:8])
        raise TrainingError(f"{starved.size} centroid classes starved after {attempts} attempts: {names}")
    cents = sums / counts[:, None]
    cents.flags.writeable = False
    counts.flags.writeable = False
    return CentroidModel(rank, cents, counts, max_length)
