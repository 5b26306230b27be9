"""Experiment runner, metrics and result files."""

from __future__ import annotations

import csv
import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .datasets import LabeledWord, word_rng
from .engines import SearchConfig, reduce_word
from .heuristics import CentroidModel, OrderedCandidates, centroid_order, max_edge_order, nielsen_first_order
from .heuristics import nielsen_reducers

CSV_HEADER = ["word_id", "algo", "input_len", "output_len", "steps_total", "steps_reducing", "time_ms", "correct"]
HEURISTICS = ("nielsen-first", "max-edge", "centroid")


@dataclass(frozen=True)
class RunRecord:
    word_id: int
    algo: str
    input_len: int
    output_len: int
    steps_total: int
    steps_reducing: int
    time_ms: float
    correct: Optional[bool]
    terminated_by: str = ""


@dataclass(frozen=True)
class AggregateMetrics:
    algo: str
    count: int
    ns_mean: float
    ns_std: float
    nred_mean: float
    nred_std: float
    t_mean: float  # seconds
    t_std: float
    error_rate: Optional[float]
    checked: int


def aggregate(algo: str, records: Sequence[RunRecord]) -> AggregateMetrics:
    ns = np.array([r.steps_total for r in records], dtype=float)
    nred = np.array([r.steps_reducing for r in records], dtype=float)
    t = np.array([r.time_ms for r in records], dtype=float) / 1000.0
    judged = [r.correct for r in records if r.correct is not None]
    err = (sum(not c for c in judged) / len(judged)) if judged else None

    def ms(a):
        return (float(a.mean()), float(a.std())) if a.size else (math.nan, math.nan)

    return AggregateMetrics(algo, len(records), *ms(ns), *ms(nred), *ms(t), err, len(judged))


def per_word_seed(seed: int, word_id: int) -> int:
    return int(word_rng(seed, word_id).integers(2**63))


def _run_one(args) -> RunRecord:
    word_id, item, cfg = args
    t0 = time.perf_counter()
    res = reduce_word(item.word, cfg)
    elapsed = (time.perf_counter() - t0) * 1000.0
    correct = None if item.oracle_min_length is None else len(res.output) == item.oracle_min_length
    return RunRecord(
        word_id, cfg.algorithm, len(item.word), len(res.output), res.steps_total, res.steps_reducing,
        elapsed, correct, res.terminated_by,
    )


def run_experiment(
    dataset: Sequence[LabeledWord],
    algorithms: Iterable[str],
    cfg: SearchConfig,
    seed: int = 0,
    jobs: int = 1,
) -> Tuple[List[RunRecord], Dict[str, AggregateMetrics]]:
    """Run each algorithm on each word with a per-word seed; return records and aggregates."""
    tasks = []
    for algo in algorithms:
        c = dataclasses.replace(cfg, algorithm=algo, progress=None if jobs > 1 else cfg.progress)
        for i, item in enumerate(dataset):
            tasks.append((i, item, dataclasses.replace(c, seed=per_word_seed(seed, i))))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        records = [_run_one(t) for t in tasks]
    records.sort(key=lambda r: (r.algo, r.word_id))
    metrics = {}
    for algo in dict.fromkeys(algorithms):
        metrics[algo] = aggregate(algo, [r for r in records if r.algo == algo])
    return records, metrics


# --- heuristic percentiles ----------------------------------------------------


def heuristic_order(name: str, word, centroids: Optional[CentroidModel] = None) -> OrderedCandidates:
    if name == "nielsen-first":
        return nielsen_first_order(word.rank)
    if name == "max-edge":
        return max_edge_order(word)
    if name == "centroid":
        if centroids is None:
            raise ValueError("the centroid heuristic needs a centroid model")
        return centroid_order(word, centroids)
    raise ValueError(f"unknown heuristic {name!r}; expected one of {', '.join(HEURISTICS)}")


def first_reducer_positions(words, name: str, centroids: Optional[CentroidModel] = None) -> List[Optional[int]]:
    """1-based index of the first reducing candidate per word (None if none reduces)."""
    out = []
    for w in words:
        pos, _ = heuristic_order(name, w, centroids).first_reducing(w)
        out.append(pos + 1 if pos >= 0 else None)
    return out


def nearest_rank(values: Sequence[float], q: float) -> float:
    if not values:
        raise ValueError("percentile of an empty sample")
    v = sorted(values)
    k = max(1, math.ceil(q / 100.0 * len(v) - 1e-9))
    return v[k - 1]


def percentile_report(words, heuristic: str, q: float = 99, centroids: Optional[CentroidModel] = None) -> int:
    """q-th percentile (nearest rank) of the first-reducer index; unreduced words excluded."""
    if not words:
        raise ValueError("percentile report needs a non-empty dataset")
    found = [p for p in first_reducer_positions(words, heuristic, centroids) if p is not None]
    if not found:
        raise ValueError("no word was reduced by any candidate")
    return int(nearest_rank(found, q))


def nielsen_reducible_fraction(words) -> float:
    words = list(words)
    return sum(nielsen_reducers(w).size > 0 for w in words) / len(words)


# --- result files ------------------------------------------------------------------


def _fmt_correct(c: Optional[bool]) -> str:
    return "" if c is None else ("true" if c else "false")


def write_records(records: Iterable[RunRecord], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_HEADER)
        for r in records:
            out.writerow([
                r.word_id, r.algo, r.input_len, r.output_len, r.steps_total, r.steps_reducing,
                f"{r.time_ms:.3f}", _fmt_correct(r.correct),
            ])


def read_records(path: Union[str, Path]) -> List[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [
        RunRecord(
            int(r["word_id"]), r["algo"], int(r["input_len"]), int(r["output_len"]), int(r["steps_total"]),
            int(r["steps_reducing"]), float(r["time_ms"]), None if r["correct"] == "" else r["correct"] == "true",
        )
        for r in rows
    ]


SUMMARY_COLUMNS = ["algo", "count", "Ns_mean", "Ns_std", "Nred_mean", "Nred_std", "Tavg_s", "T_std", "E"]


def _summary_rows(metrics: Dict[str, AggregateMetrics]) -> List[List[str]]:
    rows = []
    for m in metrics.values():
        err = "" if m.error_rate is None else f"{m.error_rate:.4f}"
        rows.append([
            m.algo.upper(), str(m.count), f"{m.ns_mean:.1f}", f"{m.ns_std:.1f}", f"{m.nred_mean:.2f}",
            f"{m.nred_std:.2f}", f"{m.t_mean:.4f}", f"{m.t_std:.4f}", err,
        ])
    return rows


def format_summary(metrics: Dict[str, AggregateMetrics], title: str = "") -> str:
    rows = [SUMMARY_COLUMNS] + _summary_rows(metrics)
    widths = [max(len(r[i]) for r in rows) for i in range(len(SUMMARY_COLUMNS))]
    lines = [title] if title else []
    for r in rows:
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return "\n".join(lines) + "\n"


def emit_results(
    records: Sequence[RunRecord], metrics: Dict[str, AggregateMetrics], path: Union[str, Path], title: str = ""
) -> Tuple[Path, Path, Path]:
    """Write ``path`` (per-record CSV) plus ``.summary.txt`` and ``.summary.csv`` beside it."""
    path = Path(path)
    try:
        write_records(records, path)
        txt = path.with_suffix(".summary.txt")
        txt.write_text(format_summary(metrics, title), encoding="utf-8")
        scsv = path.with_suffix(".summary.csv")
        with open(scsv, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(SUMMARY_COLUMNS)
            out.writerows(_summary_rows(metrics))
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path, txt, scsv
