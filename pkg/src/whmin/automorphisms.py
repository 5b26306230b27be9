"""Nielsen and (type II) Whitehead automorphisms of a free group.

A Whitehead automorphism fixes a multiplier letter ``a`` and sends every
other generator ``x`` to one of ``x``, ``x a``, ``a^-1 x`` or ``a^-1 x a``.
Nielsen automorphisms (``x -> x y`` or ``x -> y x``) are the Whitehead
automorphisms with a single non-trivial action.

Applying an automorphism substitutes images letter by letter, then freely
and cyclically reduces, so lengths are always cyclic lengths.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Dict, NamedTuple, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .kernels import LETTER_DTYPE
from .words import RankMismatch, SeedLike, Word, format_letter, parse_letter, rng_from

FIX, RIGHT, LEFT, CONJ = 0, 1, 2, 3
ACTION_NAMES = ("fix", "right", "left", "conj")
_IMAGE_LEN = np.array([1, 2, 2, 3], dtype=LETTER_DTYPE)

MAX_ENUM_RANK = 30
MAX_LIST_RANK = 8


class NielsenAut(NamedTuple):
    """``x_target -> x_target * multiplier`` (right) or ``multiplier * x_target`` (left)."""

    target: int
    multiplier: int
    side: str = "right"

    def to_whitehead(self, rank: int) -> "WhiteheadAut":
        actions = [FIX] * rank
        if self.side == "right":
            actions[self.target - 1] = RIGHT
            return WhiteheadAut(self.multiplier, tuple(actions))
        actions[self.target - 1] = LEFT
        return WhiteheadAut(-self.multiplier, tuple(actions))

    def inverse(self) -> "NielsenAut":
        return NielsenAut(self.target, -self.multiplier, self.side)

    def __str__(self) -> str:
        x, y = format_letter(self.target), format_letter(self.multiplier)
        img = f"{x}*{y}" if self.side == "right" else f"{y}*{x}"
        return f"N({x}->{img})"


class WhiteheadAut(NamedTuple):
    """Multiplier letter plus one action code per generator.

    The slot of the multiplier's own generator is always ``FIX``.
    """

    multiplier: int
    actions: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.actions)

    def image(self, generator: int) -> Tuple[int, ...]:
        a = self.multiplier
        c = self.actions[generator - 1]
        g = generator
        return ((g,), (g, a), (-a, g), (-a, g, a))[c]

    def table(self) -> Tuple[np.ndarray, np.ndarray]:
        return _table(self)

    def inverse(self) -> "WhiteheadAut":
        # a is fixed, so substituting a^-1 for a undoes every action
        return WhiteheadAut(-self.multiplier, self.actions)

    def is_nielsen(self) -> bool:
        moved = [c for c in self.actions if c != FIX]
        return len(moved) == 1 and moved[0] in (RIGHT, LEFT)

    def to_nielsen(self) -> NielsenAut:
        if not self.is_nielsen():
            raise ValueError(f"{self} is not a Nielsen automorphism")
        g = next(i + 1 for i, c in enumerate(self.actions) if c != FIX)
        if self.actions[g - 1] == RIGHT:
            return NielsenAut(g, self.multiplier, "right")
        return NielsenAut(g, -self.multiplier, "left")

    def __str__(self) -> str:
        moved = ", ".join(
            f"{format_letter(i + 1)}:{ACTION_NAMES[c]}" for i, c in enumerate(self.actions) if c != FIX
        )
        return f"W(a={format_letter(self.multiplier)}; {moved})"


Automorphism = Union[NielsenAut, WhiteheadAut]
AutSequence = Tuple[WhiteheadAut, ...]


@lru_cache(maxsize=1 << 16)
def _table(aut: WhiteheadAut) -> Tuple[np.ndarray, np.ndarray]:
    n = aut.rank
    img = np.zeros((n + 1, 3), LETTER_DTYPE)
    lens = np.zeros(n + 1, LETTER_DTYPE)
    for g in range(1, n + 1):
        im = aut.image(g)
        img[g, : len(im)] = im
        lens[g] = len(im)
    img.flags.writeable = False
    lens.flags.writeable = False
    return img, lens


# --- counts and enumeration -------------------------------------------------


def count_nielsen(rank: int) -> int:
    return 4 * rank * (rank - 1)


def count_whitehead(rank: int) -> int:
    if rank > MAX_ENUM_RANK:
        raise ValueError(f"rank {rank} exceeds the supported maximum {MAX_ENUM_RANK}")
    return 2 * rank * 4 ** (rank - 1) - 2 * rank


def vertex_letters(rank: int) -> Tuple[int, ...]:
    """Letters in vertex order ``x1, X1, x2, X2, ...``."""
    return tuple(s * k for k in range(1, rank + 1) for s in (1, -1))


def _check_rank(rank: int) -> None:
    if rank < 2:
        raise ValueError(f"automorphism sets need rank >= 2, got {rank}")
    if rank > MAX_ENUM_RANK:
        raise ValueError(f"rank {rank} exceeds the supported maximum {MAX_ENUM_RANK}")


@lru_cache(maxsize=None)
def enumerate_nielsen(rank: int) -> Tuple[NielsenAut, ...]:
    """All ``4n(n-1)`` Nielsen automorphisms, by target, multiplier, side."""
    _check_rank(rank)
    return tuple(
        NielsenAut(x, y, side)
        for x in range(1, rank + 1)
        for y in vertex_letters(rank)
        if abs(y) != x
        for side in ("right", "left")
    )


@lru_cache(maxsize=None)
def enumerate_whitehead(rank: int) -> Tuple[WhiteheadAut, ...]:
    """All ``2n 4^(n-1) - 2n`` Whitehead automorphisms, by multiplier then actions."""
    _check_rank(rank)
    if rank > MAX_LIST_RANK:
        raise ValueError(f"listing W(X) for rank {rank} is impractical; use random_whitehead")
    out = []
    for a in vertex_letters(rank):
        slot = abs(a) - 1
        for combo in itertools.islice(itertools.product(range(4), repeat=rank - 1), 1, None):
            out.append(WhiteheadAut(a, combo[:slot] + (FIX,) + combo[slot:]))
    return tuple(out)


def whitehead_index(aut: WhiteheadAut) -> int:
    """Position of ``aut`` in :func:`enumerate_whitehead` (computed, not searched)."""
    n = aut.rank
    a = aut.multiplier
    vertex = 2 * (abs(a) - 1) + (a < 0)
    pos = 0
    for i, c in enumerate(aut.actions):
        if i != abs(a) - 1:
            pos = 4 * pos + c
    return vertex * (4 ** (n - 1) - 1) + pos - 1


@lru_cache(maxsize=None)
def whitehead_tables(rank: int) -> Tuple[np.ndarray, np.ndarray]:
    """Stacked image tables for :func:`enumerate_whitehead`.

    Shapes ``(m, rank + 1, 3)`` and ``(m, rank + 1)``.
    """
    auts = enumerate_whitehead(rank)
    acts = np.array([w.actions for w in auts], dtype=LETTER_DTYPE)
    mult = np.array([w.multiplier for w in auts], dtype=LETTER_DTYPE)[:, None]
    gens = np.arange(1, rank + 1, dtype=LETTER_DTYPE)[None, :]
    imgs = np.zeros((len(auts), rank + 1, 3), LETTER_DTYPE)
    imgs[:, 1:, 0] = np.where(acts <= RIGHT, gens, -mult)
    imgs[:, 1:, 1] = np.where(acts == RIGHT, mult, np.where(acts >= LEFT, gens, 0))
    imgs[:, 1:, 2] = np.where(acts == CONJ, mult, 0)
    lens = np.zeros((len(auts), rank + 1), LETTER_DTYPE)
    lens[:, 1:] = _IMAGE_LEN[acts]
    imgs.flags.writeable = False
    lens.flags.writeable = False
    return imgs, lens


@lru_cache(maxsize=None)
def nielsen_subset_index(rank: int) -> Dict[NielsenAut, int]:
    """Map each Nielsen automorphism to its position among the Whitehead ones."""
    return {t: whitehead_index(t.to_whitehead(rank)) for t in enumerate_nielsen(rank)}


@lru_cache(maxsize=None)
def nielsen_tables(rank: int) -> Tuple[np.ndarray, np.ndarray]:
    """Image tables for :func:`enumerate_nielsen`, same order."""
    imgs = np.zeros((count_nielsen(rank), rank + 1, 3), LETTER_DTYPE)
    lens = np.zeros((count_nielsen(rank), rank + 1), LETTER_DTYPE)
    for i, t in enumerate(enumerate_nielsen(rank)):
        imgs[i], lens[i] = _table(t.to_whitehead(rank))
    imgs.flags.writeable = False
    lens.flags.writeable = False
    return imgs, lens


def random_whitehead(rank: int, seed: SeedLike = None, density: float | None = None) -> WhiteheadAut:
    """Random Whitehead automorphism.

    With ``density=None`` the draw is uniform over W(X).  Otherwise each
    non-multiplier generator is moved independently with probability
    ``density`` (action uniform over right/left/conj), which favours sparse
    automorphisms in large ranks.
    """
    rng = rng_from(seed)
    a = vertex_letters(rank)[int(rng.integers(2 * rank))]
    slot = abs(a) - 1
    while True:
        if density is None:
            acts = rng.integers(4, size=rank)
        else:
            acts = np.where(rng.random(rank) < density, rng.integers(1, 4, size=rank), FIX)
        acts[slot] = FIX
        if acts.any():
            return WhiteheadAut(a, tuple(int(c) for c in acts))


# --- application ------------------------------------------------------------


def _whitehead_of(aut: Automorphism, rank: int) -> WhiteheadAut:
    if isinstance(aut, WhiteheadAut):
        if aut.rank != rank:
            raise RankMismatch(f"automorphism of rank {aut.rank} applied to a word of rank {rank}")
        return aut
    if max(aut.target, abs(aut.multiplier)) > rank:
        raise RankMismatch(f"{aut} does not act on a free group of rank {rank}")
    return aut.to_whitehead(rank)


def apply(aut: Automorphism, w: Word) -> Word:
    """Image of ``w`` under ``aut``, freely and cyclically reduced."""
    img, lens = _table(_whitehead_of(aut, w.rank))
    return Word(kernels.apply_table(w.letters, img, lens), w.rank, check=False)


def apply_sequence(seq: Sequence[Automorphism], w: Word) -> Word:
    """``w t1 t2 ... ts``, applied left to right."""
    for t in seq:
        w = apply(t, w)
    return w


# --- text form --------------------------------------------------------------

_NIELSEN_RE = re.compile(r"^N\((\w+)->(\w+)\*(\w+)\)$")
_WHITEHEAD_RE = re.compile(r"^W\(a=(\w+);\s*(.*)\)$")


def parse_automorphism(text: str, rank: int) -> Automorphism:
    """Inverse of ``str()`` for both automorphism kinds."""
    text = text.strip()
    m = _NIELSEN_RE.match(text)
    if m:
        x, l, r = (parse_letter(t) for t in m.groups())
        if x <= 0:
            raise ValueError(f"bad Nielsen target in {text!r}")
        if l == x:
            return NielsenAut(x, r, "right")
        if r == x:
            return NielsenAut(x, l, "left")
        raise ValueError(f"bad Nielsen automorphism {text!r}")
    m = _WHITEHEAD_RE.match(text)
    if m:
        a = parse_letter(m.group(1))
        actions = [FIX] * rank
        for part in filter(None, (p.strip() for p in m.group(2).split(","))):
            gen, _, name = part.partition(":")
            actions[parse_letter(gen) - 1] = ACTION_NAMES.index(name)
        return WhiteheadAut(a, tuple(actions))
    raise ValueError(f"unrecognised automorphism {text!r}")


def find_whitehead_reducer(w: Word) -> Tuple[int, int]:
    """First-improvement sweep of W(X) over the cyclic word ``w``.

    Returns ``(index, steps)`` with ``index = -1`` when no automorphism
    shortens ``w``.
    """
    imgs, lens = whitehead_tables(w.rank)
    order = np.arange(imgs.shape[0])
    pos, steps = kernels.first_reducing(w.letters, imgs, lens, order, len(w))
    return int(pos), int(steps)


def is_whitehead_minimal(w: Word) -> bool:
    """Exact minimality test by exhaustive sweep (assumes ``w`` cyclically reduced)."""
    if len(w) <= 1:
        return True
    return find_whitehead_reducer(w)[0] < 0
