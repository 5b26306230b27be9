"""Reduced words in a free group of finite rank.

A :class:`Word` wraps a read-only ``int32`` array of signed letters
(``+k`` for ``x_k``, ``-k`` for ``x_k^{-1}``) together with the rank of the
ambient free group.  Words are values: every operation returns a new one.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from . import kernels
from .kernels import LETTER_DTYPE

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]

_TOKEN = re.compile(r"^([xX])(\d+)$")


class WordError(ValueError):
    """Malformed, non-reduced, or out-of-range word data."""


class RankMismatch(ValueError):
    pass


class Letter(NamedTuple):
    generator: int
    sign: int = 1

    @property
    def code(self) -> int:
        return self.sign * self.generator

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return cls(abs(int(code)), 1 if code > 0 else -1)

    def inverse(self) -> "Letter":
        return Letter(self.generator, -self.sign)

    def __str__(self) -> str:
        return format_letter(self.code)


def format_letter(code: int) -> str:
    return f"x{code}" if code > 0 else f"X{-code}"


def parse_letter(token: str) -> int:
    m = _TOKEN.match(token)
    if m is None or int(m.group(2)) < 1:
        raise WordError(f"bad letter token {token!r}")
    k = int(m.group(2))
    return k if m.group(1) == "x" else -k


def _as_codes(raw) -> np.ndarray:
    if isinstance(raw, np.ndarray):
        return np.ascontiguousarray(raw, dtype=LETTER_DTYPE)
    return np.array([x.code if isinstance(x, Letter) else int(x) for x in raw], dtype=LETTER_DTYPE)


def _check_range(codes: np.ndarray, rank: int) -> None:
    if rank < 1:
        raise WordError(f"rank must be positive, got {rank}")
    if codes.size and (np.any(codes == 0) or np.abs(codes).max() > rank):
        bad = codes[(codes == 0) | (np.abs(codes) > rank)][0]
        raise WordError(f"letter {int(bad)} is outside the alphabet of rank {rank}")


class Word:
    """Freely reduced word over ``x_1 .. x_rank`` and their inverses."""

    __slots__ = ("_letters", "rank", "_hash")

    def __init__(self, letters, rank: int, *, check: bool = True):
        codes = _as_codes(letters)
        if check:
            _check_range(codes, rank)
            if not kernels.is_freely_reduced(codes):
                raise WordError("word is not freely reduced")
        if codes.flags.writeable:
            if codes is letters or codes.base is not None:
                codes = codes.copy()
            codes.flags.writeable = False
        self._letters = codes
        self.rank = int(rank)
        self._hash = None

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls(np.empty(0, LETTER_DTYPE), rank, check=False)

    @classmethod
    def parse(cls, text: str, rank: int) -> "Word":
        """Parse ``"x1 X3 x2"``; the empty string is the identity."""
        codes = [parse_letter(tok) for tok in text.split()]
        return cls(codes, rank)

    @property
    def letters(self) -> np.ndarray:
        return self._letters

    def __len__(self) -> int:
        return int(self._letters.shape[0])

    def __iter__(self):
        return (Letter.from_code(c) for c in self._letters)

    def __getitem__(self, i) -> Letter:
        return Letter.from_code(self._letters[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.rank == other.rank and np.array_equal(self._letters, other._letters)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, self._letters.tobytes()))
        return self._hash

    def __str__(self) -> str:
        return " ".join(format_letter(int(c)) for c in self._letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, rank={self.rank})"

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return inverse(self)

    def is_cyclically_reduced(self) -> bool:
        n = len(self)
        return n < 2 or self._letters[0] != -self._letters[-1]

    def rotations(self):
        for i in range(max(len(self), 1)):
            yield Word(np.roll(self._letters, -i), self.rank, check=False)


def free_reduce(raw: Union[Sequence, np.ndarray, Iterable], rank: int) -> Word:
    """Cancel adjacent ``x x^-1`` pairs until none remain."""
    codes = _as_codes(raw)
    _check_range(codes, rank)
    return Word(kernels.free_reduce_array(codes), rank, check=False)


def cyclic_reduce(w: Word) -> Word:
    lo, hi = kernels.cyclic_bounds(w.letters)
    if lo == 0 and hi == len(w):
        return w
    return Word(w.letters[lo:hi], w.rank, check=False)


def multiply(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise RankMismatch(f"cannot multiply words of rank {u.rank} and {v.rank}")
    joined = np.concatenate([u.letters, v.letters])
    return Word(kernels.free_reduce_array(joined), u.rank, check=False)


def inverse(w: Word) -> Word:
    return Word(-w.letters[::-1], w.rank, check=False)


def cyclic_length(w: Word) -> int:
    lo, hi = kernels.cyclic_bounds(w.letters)
    return int(hi - lo)


def is_rotation(u: Word, v: Word) -> bool:
    """True when ``v`` is a cyclic rotation of ``u``."""
    if u.rank != v.rank or len(u) != len(v):
        return False
    if len(u) == 0:
        return True
    doubled = np.concatenate([u.letters, u.letters])
    windows = np.lib.stride_tricks.sliding_window_view(doubled[:-1], len(v))
    return bool(np.any(np.all(windows == v.letters, axis=1)))


# --- random words -----------------------------------------------------------


def rng_from(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_reduced_word(rank: int, length: int, seed: SeedLike = None) -> Word:
    """Uniform random reduced word of exactly ``length`` letters.

    The first letter is uniform over the ``2n`` letters and each later one
    uniform over the ``2n - 1`` letters that do not cancel its predecessor.
    """
    if length < 0:
        raise WordError("length must be non-negative")
    if rank < 1:
        raise WordError(f"rank must be positive, got {rank}")
    if length == 0:
        return Word.identity(rank)
    rng = rng_from(seed)
    first = int(rng.integers(2 * rank))
    offsets = rng.integers(2 * rank - 1, size=length - 1)
    return Word(kernels.build_reduced_word(rank, first, offsets), rank, check=False)


def random_cyclically_reduced_word(rank: int, length: int, seed: SeedLike = None) -> Word:
    """Rejection-sample :func:`random_reduced_word` until first != last^-1."""
    if length < 1:
        raise WordError("length must be at least 1")
    if rank < 2 and length >= 2:
        # F_1: only the powers x^k and X^k survive
        rng = rng_from(seed)
        sign = 1 if rng.integers(2) == 0 else -1
        return Word(np.full(length, sign, LETTER_DTYPE), rank, check=False)
    rng = rng_from(seed)
    while True:
        w = random_reduced_word(rank, length, rng)
        if w.is_cyclically_reduced():
            return w
