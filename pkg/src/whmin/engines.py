"""Whitehead minimization engines: WR, HDWR and HPWR.

Every engine counts each automorphism application as one elementary step
(``steps_total``) and each accepted length-reducing application separately
(``steps_reducing``).  Lengths are cyclic lengths throughout.

* ``wr`` repeats a first-improvement sweep of W(X) until nothing shortens
  the word; the final sweep certifies minimality.
* ``hdwr`` gates cheap Nielsen checks (maximal edge pair, centroid order,
  optionally SWR) behind the classifier, and falls back to the full sweep
  whenever they fail, so its output is still certified.
* ``hpwr`` runs the cheap checks first and stops as soon as the classifier
  calls the word minimal; it never sweeps W(X).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import kernels
from .automorphisms import (
    AutSequence,
    WhiteheadAut,
    apply,
    enumerate_nielsen,
    enumerate_whitehead,
    find_whitehead_reducer,
    nielsen_tables,
)
from .classifier import WminModel, is_classified_minimal
from .genetic import GaConfig, swr
from .heuristics import CentroidModel, centroid_order, max_edge_order
from .words import SeedLike, Word, WordError, rng_from

Progress = Callable[[int, int, int], None]

FULL_SWEEP = "full-sweep"
CLASSIFIER = "classifier"
SWR_EXHAUSTED = "swr-exhausted"
TRIVIAL = "trivial"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = "hdwr"
    ga: GaConfig = field(default_factory=GaConfig)
    enable_swr_in_hdwr: Optional[bool] = None
    wmin: Optional[WminModel] = None
    centroids: Optional[CentroidModel] = None
    classifier_gate: bool = True
    use_swr: bool = True
    seed: SeedLike = None
    progress: Optional[Progress] = field(default=None, compare=False)

    @property
    def centroid_model(self) -> Optional[CentroidModel]:
        if self.centroids is not None:
            return self.centroids
        return self.wmin.centroids if self.wmin is not None else None

    def swr_in_hdwr(self, rank: int) -> bool:
        if not self.use_swr:
            return False
        if self.enable_swr_in_hdwr is None:
            return rank >= 6
        return self.enable_swr_in_hdwr


@dataclass(frozen=True)
class ReductionResult:
    input: Word
    output: Word
    applied: AutSequence
    steps_total: int
    steps_reducing: int
    terminated_by: str

    @property
    def lengths(self) -> List[int]:
        return [len(self.input)] + [len(w) for w in _replay(self.input, self.applied)]


def _replay(u: Word, seq: AutSequence):
    for t in seq:
        u = apply(t, u)
        yield u


class _Run:
    def __init__(self, u: Word, progress: Optional[Progress]):
        if not u.is_cyclically_reduced():
            raise WordError("reduction engines need a cyclically reduced word")
        self.input = u
        self.word = u
        self.applied: List[WhiteheadAut] = []
        self.steps = 0
        self.progress = progress
        self.iteration = 0

    def accept(self, seq, image: Word) -> None:
        assert len(image) < len(self.word)
        self.applied.extend(seq)
        self.word = image
        self.iteration += 1
        if self.progress is not None:
            self.progress(self.iteration, len(image), self.steps)

    def result(self, how: str) -> ReductionResult:
        return ReductionResult(self.input, self.word, tuple(self.applied), self.steps, len(self.applied), how)


def _try_nielsen(run: _Run, indices: np.ndarray) -> bool:
    """Apply Nielsen candidates in order; accept the first that shortens the word."""
    if indices.size == 0:
        return False
    w = run.word
    imgs, lens = nielsen_tables(w.rank)
    pos, steps = kernels.first_reducing(w.letters, imgs, lens, indices, len(w))
    run.steps += int(steps)
    if pos < 0:
        return False
    t = enumerate_nielsen(w.rank)[indices[pos]].to_whitehead(w.rank)
    run.accept((t,), apply(t, w))
    return True


def _try_sweep(run: _Run) -> bool:
    pos, steps = find_whitehead_reducer(run.word)
    run.steps += steps
    if pos < 0:
        return False
    t = enumerate_whitehead(run.word.rank)[pos]
    run.accept((t,), apply(t, run.word))
    return True


def _try_swr(run: _Run, ga: GaConfig, rng: np.random.Generator) -> bool:
    found = swr(run.word, ga, rng)
    run.steps += found.steps
    if not found.found:
        return False
    run.accept(found.sequence, found.image)
    return True


def _fast_nielsen(run: _Run, centroids: Optional[CentroidModel]) -> bool:
    """Maximal-edge pair, then the centroid order over the remaining Nielsen maps."""
    pair = max_edge_order(run.word).indices[:2]
    if _try_nielsen(run, pair):
        return True
    if centroids is None:
        return False
    return _try_nielsen(run, centroid_order(run.word, centroids, exclude=pair).indices)


# --- WR -----------------------------------------------------------------------


def wlr(u: Word) -> Optional[Tuple[WhiteheadAut, Word]]:
    """First automorphism of W(X), in enumeration order, that shortens ``u``."""
    if len(u) <= 1:
        return None
    pos, _ = find_whitehead_reducer(u)
    if pos < 0:
        return None
    t = enumerate_whitehead(u.rank)[pos]
    return t, apply(t, u)


def wr(u: Word, progress: Optional[Progress] = None) -> ReductionResult:
    """Iterate :func:`wlr` to an automorphically minimal word."""
    run = _Run(u, progress)
    while len(run.word) > 1:
        if not _try_sweep(run):
            return run.result(FULL_SWEEP)
    return run.result(TRIVIAL)


# --- hybrids --------------------------------------------------------------------


def hdwr(u: Word, cfg: SearchConfig = SearchConfig()) -> ReductionResult:
    """Deterministic hybrid: classifier-gated fast checks, full sweep as fallback."""
    if cfg.classifier_gate and cfg.wmin is None:
        raise ConfigError("hdwr with the classifier gate needs a WMIN model")
    centroids = cfg.centroid_model
    use_swr = cfg.swr_in_hdwr(u.rank)
    rng = rng_from(cfg.seed)
    run = _Run(u, cfg.progress)
    while len(run.word) > 1:
        reduced = False
        if not (cfg.classifier_gate and is_classified_minimal(cfg.wmin, run.word)):
            reduced = _fast_nielsen(run, centroids) or (use_swr and _try_swr(run, cfg.ga, rng))
        if not reduced and not _try_sweep(run):
            return run.result(FULL_SWEEP)
    return run.result(TRIVIAL)


def hpwr(u: Word, cfg: SearchConfig = SearchConfig()) -> ReductionResult:
    """Probabilistic hybrid: stops when the classifier declares the word minimal."""
    centroids = cfg.centroid_model
    if cfg.wmin is None or centroids is None:
        raise ConfigError("hpwr needs both a WMIN model and a centroid model")
    rng = rng_from(cfg.seed)
    run = _Run(u, cfg.progress)
    while len(run.word) > 1:
        if _fast_nielsen(run, centroids):
            continue
        if is_classified_minimal(cfg.wmin, run.word):
            return run.result(CLASSIFIER)
        if not (cfg.use_swr and _try_swr(run, cfg.ga, rng)):
            return run.result(SWR_EXHAUSTED)
    return run.result(TRIVIAL)


ENGINES = {"wr": lambda u, cfg: wr(u, cfg.progress), "hdwr": hdwr, "hpwr": hpwr}


def reduce_word(u: Word, cfg: SearchConfig) -> ReductionResult:
    try:
        engine = ENGINES[cfg.algorithm]
    except KeyError:
        raise ConfigError(f"unknown algorithm {cfg.algorithm!r}") from None
    return engine(u, cfg)
