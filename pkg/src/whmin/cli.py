"""Command-line entry point: ``whmin {train,gen,reduce,classify,bench,percentile}``."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import bench, datasets
from .automorphisms import MAX_LIST_RANK
from .classifier import ModelError, WminModel, load_model, mahalanobis_sq, decide, save_model, train_wmin
from .datasets import DatasetError, DatasetSpec, LabeledWord
from .engines import ConfigError, SearchConfig
from .genetic import GaConfig
from .heuristics import TrainingError, train_centroids
from .words import RankMismatch, WordError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
ALGOS = ("wr", "hdwr", "hpwr")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _available_cpus() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("WHMIN_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"WHMIN_SEED must be an integer, got {env!r}") from None
    return int(np.random.SeedSequence().entropy % 2**63)


def _csv_list(choices):
    def parse(text: str) -> List[str]:
        items = [t.strip() for t in text.split(",") if t.strip()]
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"expected a comma list from {', '.join(choices)}")
        return items

    return parse


def _log(args, msg: str) -> None:
    if getattr(args, "verbose", False):
        print(msg, file=sys.stderr)


def _load(args) -> Optional[WminModel]:
    if args.model is None:
        return None
    model = load_model(args.model)
    if getattr(args, "rank", None) is not None and model.rank != args.rank:
        raise DataError(f"model {args.model} has rank {model.rank} but --rank is {args.rank}")
    return model


def _search_config(args, model: Optional[WminModel], algos: Sequence[str]) -> SearchConfig:
    needs = [a for a in algos if a != "wr"]
    if needs and model is None:
        raise UsageError(f"--model is required for {'/'.join(needs)}; create one with 'whmin train'")
    if "hpwr" in algos and model.centroids is None:
        raise DataError(f"model {args.model} has no centroids, which hpwr needs; retrain it with 'whmin train'")
    ga = GaConfig()
    if args.pop is not None or args.gens is not None:
        try:
            ga = dataclasses.replace(
                ga,
                population=ga.population if args.pop is None else args.pop,
                generations=ga.generations if args.gens is None else args.gens,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    progress = None
    if args.verbose:
        def progress(i, length, steps):
            print(f"  iteration {i}: length {length}, steps {steps}", file=sys.stderr)
    return SearchConfig(ga=ga, wmin=model, use_swr=not args.no_swr, progress=progress)


def _check_sweep_rank(algos, rank: int) -> None:
    sweeping = [a for a in algos if a in ("wr", "hdwr")]
    if sweeping and rank > MAX_LIST_RANK:
        raise DataError(
            f"{', '.join(sweeping)} sweep all of W(X) and support rank <= {MAX_LIST_RANK}; got rank {rank}"
        )


def _read(args) -> List[LabeledWord]:
    rank, items = datasets.read_dataset(args.inp, normalize=args.normalize)
    if getattr(args, "rank", None) is not None and rank != args.rank:
        raise DataError(f"{args.inp} holds rank {rank} words but --rank is {args.rank}")
    if not items:
        raise DataError(f"{args.inp} contains no words")
    args.rank = rank
    return items


# --- subcommands -------------------------------------------------------------------


def cmd_train(args) -> int:
    seed = _seed(args)
    ss = np.random.SeedSequence(seed)
    s_wmin, s_cent = (np.random.default_rng(s) for s in ss.spawn(2))
    _log(args, f"training WMIN for rank {args.rank} on {args.samples} words (seed {seed})")
    try:
        model = train_wmin(
            args.rank, args.samples, args.alpha, (args.len_min, args.len_max), s_wmin, certify=args.certify_training
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _log(args, f"rho = {model.rho:.4f}; training centroids")
    cent = train_centroids(args.rank, args.centroid_max_len, args.centroid_samples, s_cent)
    save_model(model.with_centroids(cent), args.out)
    print(f"wrote {args.out} (rank {args.rank}, rho {model.rho:.6g})")
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = DatasetSpec(args.set, args.rank, args.count, _seed(args), base_length=(args.len_min, args.len_max))
    items = datasets.gen_dataset(spec, jobs=args.jobs)
    datasets.write_dataset(args.out, args.rank, items, header=f"set={args.set} count={args.count} seed={spec.seed}")
    print(f"wrote {len(items)} words to {args.out}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    items = _read(args)
    model = _load(args)
    _check_sweep_rank([args.algo], args.rank)
    cfg = _search_config(args, model, [args.algo])
    records, metrics = bench.run_experiment(items, [args.algo], cfg, _seed(args), jobs=args.jobs)
    bench.write_records(records, args.out)
    print(bench.format_summary(metrics), end="")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = _load(args)
    if model is None:
        raise UsageError("classify needs --model; create one with 'whmin train'")
    items = _read(args)
    if model.rank != args.rank:
        raise DataError(f"model has rank {model.rank} but {args.inp} holds rank {args.rank} words")
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        print("word_id\tlabel\tdistance", file=out)
        for i, item in enumerate(items):
            if len(item.word) < 2:
                print(f"{i}\tminimal\t", file=out)
                continue
            print(f"{i}\t{decide(model, item.word)}\t{mahalanobis_sq(model, item.word):.6f}", file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_bench(args) -> int:
    model = _load(args)
    _check_sweep_rank(args.algos, args.rank)
    cfg = _search_config(args, model, args.algos)
    seed = _seed(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for kind in args.sets:
        spec = DatasetSpec(kind, args.rank, args.count, seed, base_length=(args.len_min, args.len_max))
        _log(args, f"generating {kind} ({args.count} words, rank {args.rank})")
        items = datasets.gen_dataset(spec, jobs=args.jobs)
        datasets.write_dataset(out / f"{kind}.txt", args.rank, items, header=f"set={kind} seed={seed}")
        records, metrics = bench.run_experiment(items, args.algos, cfg, seed, jobs=args.jobs)
        title = f"set {kind}, rank {args.rank}, {len(items)} words"
        bench.emit_results(records, metrics, out / f"{kind}.csv", title=title)
        print(bench.format_summary(metrics, title))
    return EXIT_OK


def cmd_percentile(args) -> int:
    model = _load(args)
    if args.heuristic == "centroid" and (model is None or model.centroids is None):
        raise UsageError("--heuristic centroid needs --model with centroids")
    if args.inp:
        items = _read(args)
    else:
        if args.rank is None:
            raise UsageError("give --in, or --rank to generate an s1 set")
        spec = DatasetSpec("s1", args.rank, 2 * args.count, _seed(args), base_length=(args.len_min, args.len_max))
        items = datasets.gen_dataset(spec, jobs=args.jobs)
    # non-minimal words only: known to be inflated, or labelled shorter than they are
    words = [
        it.word for it in items
        if (it.oracle_min_length is not None and it.oracle_min_length < len(it.word))
        or (it.oracle_min_length is None and it.automorphisms)
    ]
    if not words:
        raise DataError("no non-minimal words to report on")
    cent = model.centroids if model is not None else None
    pos = bench.first_reducer_positions(words, args.heuristic, cent)
    found = [p for p in pos if p is not None]
    if not found:
        raise DataError("no word was reduced by any Nielsen automorphism")
    value = int(bench.nearest_rank(found, args.q))
    print(
        f"heuristic={args.heuristic} q={args.q:g} value={value} "
        f"words={len(words)} unreduced={len(pos) - len(found)}"
    )
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="whmin", description="Whitehead minimization of words in free groups.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, *, model=False, inp=False, rank_required=False):
        sp.add_argument("--seed", type=int, help="RNG seed (default: $WHMIN_SEED, else random)")
        sp.add_argument("--verbose", "-v", action="store_true", help="progress messages on stderr")
        sp.add_argument("--rank", type=int, required=rank_required, help="free group rank n")
        if model:
            sp.add_argument("--model", help="model file written by 'whmin train'")
        if inp:
            sp.add_argument("--in", dest="inp", required=True, help="dataset file")
            sp.add_argument("--normalize", action="store_true", help="free and cyclically reduce words on load")

    def jobs(sp):
        sp.add_argument("--jobs", type=int, default=_available_cpus(), help="worker processes (default: all CPUs)")

    def lengths(sp):
        sp.add_argument("--len-min", type=int, default=100, help="minimum base word length")
        sp.add_argument("--len-max", type=int, default=500, help="maximum base word length")

    def search(sp):
        sp.add_argument("--no-swr", action="store_true", help="disable the genetic search stage")
        sp.add_argument("--pop", type=int, help="GA population size (default 30)")
        sp.add_argument("--gens", type=int, help="GA generations (default 100)")

    sp = sub.add_parser("train", help="train WMIN and centroids into one model file")
    common(sp, rank_required=True)
    sp.add_argument("--samples", type=int, default=10000, help="WMIN training words")
    sp.add_argument("--alpha", type=float, default=0.001, help="WMIN false-negative level")
    sp.add_argument("--len-min", type=int, default=100, help="minimum training word length")
    sp.add_argument("--len-max", type=int, default=1000, help="maximum training word length")
    sp.add_argument("--certify-training", action="store_true", help="keep only sweep-certified minimal words")
    sp.add_argument("--centroid-samples", type=int, default=50, help="words per Nielsen class")
    sp.add_argument("--centroid-max-len", type=int, default=400, help="maximum centroid training word length")
    sp.add_argument("--out", required=True, help="model file to write")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("gen", help="generate a test set")
    common(sp, rank_required=True)
    sp.add_argument("--set", required=True, choices=datasets.KINDS, help="test-set kind")
    sp.add_argument("--count", type=int, required=True, help="words to generate")
    lengths(sp)
    jobs(sp)
    sp.add_argument("--out", required=True, help="dataset file to write")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("reduce", help="minimize every word of a dataset")
    common(sp, model=True, inp=True)
    sp.add_argument("--algo", required=True, choices=ALGOS)
    search(sp)
    jobs(sp)
    sp.add_argument("--out", required=True, help="per-word results CSV")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("classify", help="label words minimal / non-minimal with WMIN")
    common(sp, model=True, inp=True)
    sp.add_argument("--out", help="write the table here instead of stdout")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("bench", help="generate sets and compare algorithms")
    common(sp, model=True, rank_required=True)
    sp.add_argument("--sets", type=_csv_list(datasets.KINDS), default=["s1", "s10", "sp"], help="comma-separated set kinds")
    sp.add_argument("--algos", type=_csv_list(ALGOS), default=list(ALGOS), help="comma-separated algorithms")
    sp.add_argument("--count", type=int, default=100, help="words per set")
    lengths(sp)
    search(sp)
    jobs(sp)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("percentile", help="percentile of the first reducing Nielsen candidate")
    common(sp, model=True)
    sp.add_argument("--heuristic", required=True, choices=bench.HEURISTICS)
    sp.add_argument("--q", type=float, default=99.0, help="percentile in (0, 100]")
    sp.add_argument("--in", dest="inp", help="dataset file (default: generate an s1 set)")
    sp.add_argument("--normalize", action="store_true", help="free and cyclically reduce words on load")
    sp.add_argument("--count", type=int, default=500, help="non-minimal words to generate without --in")
    lengths(sp)
    jobs(sp)
    sp.set_defaults(func=cmd_percentile)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            parser.error("--jobs must be at least 1")
        if not 0 < getattr(args, "q", 50) <= 100:
            parser.error("--q must lie in (0, 100]")
    except SystemExit as exc:  # argparse exits on --help and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"whmin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DatasetError, ModelError, RankMismatch, WordError, ConfigError, TrainingError) as exc:
        print(f"whmin: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"whmin: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
