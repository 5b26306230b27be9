"""Test-set generators (S1, S10, S_P) and the dataset text format.

Dataset files hold ``rank=<n>`` on the first non-comment line and then one
word per line.  Each generated word carries a trailing comment with its
provenance, e.g.::

    x1 X2 x1 x3  # base=x1 x3; auts=W(a=x2; x1:left); min=2
"""

from __future__ import annotations

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from .automorphisms import AutSequence, apply, is_whitehead_minimal, parse_automorphism, random_whitehead
from .words import Word, WordError, random_cyclically_reduced_word

KINDS = ("s1", "s10", "sp")
_KIND_CODE = {k: i for i, k in enumerate(KINDS)}
_DEFAULT_AUTS = {"s1": (1, 1), "s10": (1, 10), "sp": (1, 20)}
_DEFAULT_MAX_LENGTH = {"s1": 1000, "s10": 3000, "sp": 1000}


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    kind: str
    rank: int
    count: int
    seed: int = 0
    base_length: Tuple[int, int] = (100, 500)
    auts: Optional[Tuple[int, int]] = None
    max_length: Optional[int] = -1
    certify: Optional[bool] = None
    density: Optional[float] = None
    retries: int = 200

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DatasetError(f"unknown dataset kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.count < 1:
            raise DatasetError("count must be at least 1")
        if self.rank < 2:
            raise DatasetError("datasets need rank >= 2")
        lo, hi = self.base_length
        if not 2 <= lo <= hi:
            raise DatasetError(f"bad base length range {self.base_length}")

    @property
    def aut_range(self) -> Tuple[int, int]:
        return self.auts if self.auts is not None else _DEFAULT_AUTS[self.kind]

    @property
    def length_cap(self) -> Optional[int]:
        return _DEFAULT_MAX_LENGTH[self.kind] if self.max_length == -1 else self.max_length

    @property
    def certified(self) -> bool:
        return self.rank <= 4 if self.certify is None else self.certify


@dataclass(frozen=True)
class LabeledWord:
    word: Word
    oracle_min_length: Optional[int]
    base: Optional[Word] = None
    automorphisms: AutSequence = ()

    def provenance(self) -> str:
        parts = []
        if self.base is not None:
            parts.append(f"base={self.base}")
        parts.append("auts=" + " | ".join(str(t) for t in self.automorphisms))
        if self.oracle_min_length is not None:
            parts.append(f"min={self.oracle_min_length}")
        return "; ".join(parts)


def word_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for one dataset item, stable under reordering."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**63 - 1), *key]))


def _minimal_base(spec: DatasetSpec, rng: np.random.Generator) -> Tuple[Word, bool]:
    lo, hi = spec.base_length
    for _ in range(spec.retries):
        w = random_cyclically_reduced_word(spec.rank, int(rng.integers(lo, hi + 1)), rng)
        if not spec.certified:
            return w, False
        if is_whitehead_minimal(w):
            return w, True
    raise DatasetError(f"no certified minimal base word after {spec.retries} draws")


def _inflate_once(w: Word, spec: DatasetSpec, rng, strict: bool):
    cap = spec.length_cap
    for _ in range(spec.retries):
        t = random_whitehead(spec.rank, rng, spec.density)
        v = apply(t, w)
        if strict and len(v) <= len(w):
            continue
        if cap is not None and len(v) > cap:
            continue
        return t, v
    return None


def _s1_pair(spec: DatasetSpec, i: int) -> Tuple[LabeledWord, LabeledWord]:
    rng = word_rng(spec.seed, _KIND_CODE[spec.kind], i)
    base, cert = _minimal_base(spec, rng)
    hit = _inflate_once(base, spec, rng, strict=True)
    if hit is None:
        raise DatasetError(f"inflation retry budget exhausted for word {i}")
    t, w = hit
    m = len(base) if cert else None
    return LabeledWord(base, m, base, ()), LabeledWord(w, m, base, (t,))


def _s10_word(spec: DatasetSpec, i: int) -> LabeledWord:
    rng = word_rng(spec.seed, _KIND_CODE[spec.kind], i)
    lo, hi = spec.aut_range
    for _ in range(spec.retries):
        base, cert = _minimal_base(spec, rng)
        k = int(rng.integers(lo, hi + 1))
        w, seq = base, []
        for _ in range(k):
            hit = _inflate_once(w, spec, rng, strict=False)
            if hit is None:
                break
            seq.append(hit[0])
            w = hit[1]
        if len(w) > len(base):
            return LabeledWord(w, len(base) if cert else None, base, tuple(seq))
    raise DatasetError(f"inflation retry budget exhausted for word {i}")


def _sp_word(spec: DatasetSpec, i: int) -> LabeledWord:
    rng = word_rng(spec.seed, _KIND_CODE[spec.kind], i)
    g = int(rng.integers(1, spec.rank + 1)) * (1 if rng.integers(2) == 0 else -1)
    base = Word([g], spec.rank)
    lo, hi = spec.aut_range
    w, seq = base, []
    for _ in range(int(rng.integers(lo, hi + 1))):
        hit = _inflate_once(w, spec, rng, strict=True)
        if hit is None:
            break
        seq.append(hit[0])
        w = hit[1]
    if not seq:
        raise DatasetError(f"could not inflate generator for primitive word {i}")
    return LabeledWord(w, 1, base, tuple(seq))


def _gen_one(args):
    spec, i = args
    if spec.kind == "s1":
        return _s1_pair(spec, i)
    return (_s10_word if spec.kind == "s10" else _sp_word)(spec, i)


def gen_dataset(spec: DatasetSpec, jobs: int = 1) -> List[LabeledWord]:
    """Generate ``spec.count`` cyclically reduced words.

    * ``s1``: pairs (minimal word, the same word under one length-increasing
      Whitehead automorphism).
    * ``s10``: a minimal word under 1..10 random automorphisms, kept when the
      result is longer than the base.
    * ``sp``: a single generator under 1..20 length-increasing automorphisms
      (primitive, so the minimal length is 1).

    Every item draws from its own seed stream, so the output does not depend
    on ``jobs``.
    """
    n = (spec.count + 1) // 2 if spec.kind == "s1" else spec.count
    tasks = [(spec, i) for i in range(n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            made = list(pool.map(_gen_one, tasks, chunksize=max(1, n // (4 * jobs))))
    else:
        made = [_gen_one(t) for t in tasks]
    if spec.kind != "s1":
        return made
    return [w for pair in made for w in pair][: spec.count]


# --- file format ------------------------------------------------------------


def write_dataset(path: Union[str, Path], rank: int, items: Iterable[LabeledWord], header: str = "") -> None:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.append(f"rank={rank}")
    for item in items:
        lines.append(f"{item.word}  # {item.provenance()}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_FIELD_SPLIT = re.compile(r";\s*(?=(?:base|auts|min)=)")


def _parse_provenance(comment: str, rank: int) -> Tuple[Optional[Word], AutSequence, Optional[int]]:
    base, seq, m = None, (), None
    for part in _FIELD_SPLIT.split(comment):
        key, _, val = part.strip().partition("=")
        if key == "base":
            base = Word.parse(val, rank)
        elif key == "auts" and val.strip():
            seq = tuple(parse_automorphism(s, rank) for s in val.split("|"))
        elif key == "min":
            m = int(val)
    return base, seq, m


def read_dataset(path: Union[str, Path], normalize: bool = False) -> Tuple[int, List[LabeledWord]]:
    """Parse a dataset file.

    Words must already be freely and cyclically reduced unless ``normalize``
    is set, in which case they are reduced on load.
    """
    from .words import cyclic_reduce, free_reduce, parse_letter

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    rank = None
    items: List[LabeledWord] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("#"):
            continue
        body, _, comment = line.partition("#")
        if rank is None:
            if not body.strip():
                continue
            key, _, val = body.strip().partition("=")
            if key != "rank" or not val.isdigit():
                raise DatasetError(f"{path}:{lineno}: expected 'rank=<n>' before any word")
            rank = int(val)
            continue
        try:
            if normalize:
                w = cyclic_reduce(free_reduce([parse_letter(t) for t in body.split()], rank))
            else:
                w = Word.parse(body, rank)
                if not w.is_cyclically_reduced():
                    raise WordError("word is not cyclically reduced")
            base, seq, m = _parse_provenance(comment, rank) if comment else (None, (), None)
        except (WordError, ValueError) as exc:
            raise DatasetError(f"{path}:{lineno}: {exc}") from exc
        items.append(LabeledWord(w, m, base, seq))
    if rank is None:
        raise DatasetError(f"{path}: missing 'rank=<n>' line")
    return rank, items
