"""Stochastic Whitehead reduction (SWR): genetic search over automorphism sequences.

A chromosome is a short sequence of Whitehead automorphisms and its fitness
is the cyclic length of the image of the word.  The search stops at the
first sequence (or prefix) that shortens the word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .automorphisms import AutSequence, WhiteheadAut, apply, random_whitehead
from .words import SeedLike, Word, rng_from


def default_density(rank: int) -> float:
    """Probability that a random gene moves a given generator.

    ``0.75`` is the uniform distribution on W(X); larger ranks get sparser
    automorphisms so a random gene is not almost surely length-increasing.
    """
    if rank <= 2:
        return 0.75
    return min(0.75, 1.5 / (rank - 1))


@dataclass(frozen=True)
class GaConfig:
    population: int = 30
    generations: int = 100
    tournament: int = 3
    elite: int = 2
    p_mutate: float = 0.6
    p_crossover: float = 0.4
    init_len: Tuple[int, int] = (1, 3)
    max_len: int = 6
    density: Optional[float] = None

    def __post_init__(self):
        if self.population < self.elite + 2:
            raise ValueError("population must be at least elite + 2")
        if not (0.0 <= self.p_mutate <= 1.0 and 0.0 <= self.p_crossover <= 1.0):
            raise ValueError("GA probabilities must lie in [0, 1]")
        lo, hi = self.init_len
        if not 1 <= lo <= hi <= self.max_len:
            raise ValueError(f"bad init_len {self.init_len} for max_len {self.max_len}")
        if self.tournament < 1 or self.generations < 0:
            raise ValueError("tournament must be >= 1 and generations >= 0")


@dataclass(frozen=True)
class SwrResult:
    sequence: Optional[AutSequence]
    image: Optional[Word]
    steps: int
    generations: int

    @property
    def found(self) -> bool:
        return self.sequence is not None


def support(u: Word) -> Tuple[int, ...]:
    """Generators occurring in ``u``, ascending."""
    return tuple(int(g) for g in np.unique(np.abs(u.letters)))


class _Search:
    def __init__(self, u: Word, cfg: GaConfig, rng: np.random.Generator):
        self.u = u
        self.cfg = cfg
        self.rng = rng
        # a multiplier outside the support never shortens u (deleting it maps
        # the image back onto u), so genes only touch generators present in u
        self.support = support(u)
        k = len(self.support)
        self.density = cfg.density if cfg.density is not None else default_density(k)
        self.steps = 0
        self.hit: Optional[Tuple[AutSequence, Word]] = None
        self.memo: dict = {}

    def gene(self) -> WhiteheadAut:
        sub = random_whitehead(len(self.support), self.rng, self.density)
        acts = [0] * self.u.rank
        for g, c in zip(self.support, sub.actions):
            acts[g - 1] = c
        a = sub.multiplier
        return WhiteheadAut(self.support[abs(a) - 1] * (1 if a > 0 else -1), tuple(acts))

    def evaluate(self, chrom: AutSequence) -> int:
        if chrom in self.memo:
            return self.memo[chrom]
        w = self.u
        for i, t in enumerate(chrom):
            w = apply(t, w)
            self.steps += 1
            if len(w) < len(self.u):
                self.hit = (chrom[: i + 1], w)
                break
        self.memo[chrom] = len(w)
        return len(w)

    def pick(self, pop: List[AutSequence], fit: List[int]) -> AutSequence:
        idx = self.rng.integers(len(pop), size=self.cfg.tournament)
        best = min(idx, key=lambda i: (fit[i], i))
        return pop[best]

    def crossover(self, a: AutSequence, b: AutSequence) -> AutSequence:
        i = int(self.rng.integers(len(a) + 1))
        j = int(self.rng.integers(len(b) + 1))
        child = (a[:i] + b[j:])[: self.cfg.max_len]
        return child or a

    def mutate(self, c: AutSequence) -> AutSequence:
        op = int(self.rng.integers(3))
        if op == 2 and len(c) > 1:
            k = int(self.rng.integers(len(c)))
            return c[:k] + c[k + 1 :]
        if op == 1 or len(c) >= self.cfg.max_len:
            k = int(self.rng.integers(len(c)))
            return c[:k] + (self.gene(),) + c[k + 1 :]
        return c + (self.gene(),)


def swr(u: Word, cfg: GaConfig = GaConfig(), seed: SeedLike = None) -> SwrResult:
    """Genetic search for a sequence ``mu`` with ``|u mu| < |u|``."""
    if len(u) < 2 or len(support(u)) < 2:
        # a power of one generator is already minimal
        return SwrResult(None, None, 0, 0)
    s = _Search(u, cfg, rng_from(seed))

    pop: List[AutSequence] = []
    fit: List[int] = []
    lo, hi = cfg.init_len
    for _ in range(cfg.population):
        chrom = tuple(s.gene() for _ in range(int(s.rng.integers(lo, hi + 1))))
        pop.append(chrom)
        fit.append(s.evaluate(chrom))
        if s.hit:
            return SwrResult(s.hit[0], s.hit[1], s.steps, 0)

    for gen in range(1, cfg.generations + 1):
        ranked = sorted(range(len(pop)), key=lambda i: (fit[i], i))
        new_pop = [pop[i] for i in ranked[: cfg.elite]]
        new_fit = [fit[i] for i in ranked[: cfg.elite]]
        while len(new_pop) < cfg.population:
            child = s.pick(pop, fit)
            if s.rng.random() < cfg.p_crossover:
                child = s.crossover(child, s.pick(pop, fit))
            if s.rng.random() < cfg.p_mutate:
                child = s.mutate(child)
            new_pop.append(child)
            new_fit.append(s.evaluate(child))
            if s.hit:
                return SwrResult(s.hit[0], s.hit[1], s.steps, gen)
        pop, fit = new_pop, new_fit
    return SwrResult(None, None, s.steps, cfg.generations)
