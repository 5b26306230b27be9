"""Whitehead graph and feature vectors.

The graph lives on the ``2n`` vertices ``x1, X1, x2, X2, ...``.  Every
adjacent pair ``(a, b)`` of a cyclic word contributes one count to the edge
``{a, b^-1}`` (so the subwords ``x y^-1`` and ``y x^-1`` both land on
``{x, y}``).  Edges are all unordered vertex pairs in lexicographic order,
``n(2n - 1)`` of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Tuple

import numpy as np

from . import kernels
from .words import Word, WordError


def vertex(code: int) -> int:
    """Vertex position of a letter code."""
    return 2 * (abs(code) - 1) + (1 if code < 0 else 0)


def vertex_letter(pos: int) -> int:
    return (pos // 2 + 1) * (-1 if pos % 2 else 1)


def feature_dim(rank: int) -> int:
    return rank * (2 * rank - 1)


def edge_index(p: int, q: int, rank: int) -> int:
    """Index of the edge between vertex positions ``p != q``."""
    if p == q:
        raise ValueError("an edge needs two distinct vertices")
    if p > q:
        p, q = q, p
    v = 2 * rank
    return p * (2 * v - p - 1) // 2 + (q - p - 1)


@lru_cache(maxsize=None)
def edge_list(rank: int) -> Tuple[Tuple[int, int], ...]:
    """Edges as pairs of letter codes, in index order."""
    v = 2 * rank
    return tuple((vertex_letter(p), vertex_letter(q)) for p in range(v) for q in range(p + 1, v))


@dataclass(frozen=True)
class WhiteheadGraph:
    rank: int
    counts: np.ndarray
    total_length: int

    @property
    def weights(self) -> np.ndarray:
        return self.counts / self.total_length


def build_graph(u: Word, linear: bool = False) -> WhiteheadGraph:
    """Edge counts of ``u`` (cyclic pairs unless ``linear``)."""
    if len(u) == 0:
        raise WordError("the Whitehead graph of the empty word has no weights")
    counts = kernels.edge_counts(u.letters, u.rank, not linear)
    counts.flags.writeable = False
    return WhiteheadGraph(u.rank, counts, len(u))


def feature_vector(u: Word, linear: bool = False) -> np.ndarray:
    """Normalised edge weights ``n_e / |u|`` in edge-index order."""
    return build_graph(u, linear).weights


def feature_matrix(words: Iterable[Word], rank: int, linear: bool = False) -> np.ndarray:
    rows: List[np.ndarray] = [feature_vector(w, linear) for w in words]
    if not rows:
        return np.zeros((0, feature_dim(rank)))
    return np.vstack(rows)
