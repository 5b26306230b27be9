import numpy as np
import pytest

from whmin.bench import (
    RunRecord,
    aggregate,
    emit_results,
    first_reducer_positions,
    nearest_rank,
    nielsen_reducible_fraction,
    percentile_report,
    read_records,
    run_experiment,
)
from whmin.datasets import DatasetSpec, LabeledWord, gen_dataset
from whmin.engines import SearchConfig
from whmin.words import Word


@pytest.fixture(scope="module")
def sp3():
    return gen_dataset(DatasetSpec("sp", 3, 60, seed=81))


def test_run_experiment_on_primitives(sp3, model3):
    records, metrics = run_experiment(sp3, ["wr", "hdwr", "hpwr"], SearchConfig(wmin=model3), seed=1)
    assert len(records) == 3 * len(sp3)
    assert metrics["wr"].error_rate == 0.0
    assert metrics["hpwr"].error_rate == 0.0
    assert metrics["wr"].ns_mean > metrics["hdwr"].ns_mean
    assert metrics["wr"].nred_mean >= metrics["hdwr"].nred_mean
    for m in metrics.values():
        assert 0 <= m.error_rate <= 1 and m.ns_std >= 0 and m.t_std >= 0
    for r in records:
        assert r.correct == (r.output_len == 1)


def test_results_are_job_independent(sp3, model3):
    cfg = SearchConfig(wmin=model3)
    a, _ = run_experiment(sp3[:20], ["hpwr", "hdwr"], cfg, seed=2, jobs=1)
    b, _ = run_experiment(sp3[:20], ["hpwr", "hdwr"], cfg, seed=2, jobs=2)
    strip = lambda rs: [(r.word_id, r.algo, r.output_len, r.steps_total, r.steps_reducing) for r in rs]
    assert strip(a) == strip(b)


def test_correct_undefined_without_oracle():
    item = LabeledWord(Word.parse("x1 x2 x3", 3), None)
    records, metrics = run_experiment([item], ["wr"], SearchConfig(), seed=0)
    assert records[0].correct is None and metrics["wr"].error_rate is None


def test_emit_round_trip_and_summary(sp3, model3, tmp_path):
    records, metrics = run_experiment(sp3[:10], ["wr", "hpwr"], SearchConfig(wmin=model3), seed=3)
    csv_path, txt, scsv = emit_results(records, metrics, tmp_path / "r.csv")
    back = read_records(csv_path)
    key = lambda r: (r.word_id, r.algo, r.input_len, r.output_len, r.steps_total, r.steps_reducing, r.correct)
    assert [key(r) for r in back] == [key(r) for r in records]
    assert csv_path.read_text().splitlines()[0] == (
        "word_id,algo,input_len,output_len,steps_total,steps_reducing,time_ms,correct"
    )
    assert len(scsv.read_text().splitlines()) == 1 + 2
    assert "HPWR" in txt.read_text()
    with pytest.raises(OSError):
        emit_results(records, metrics, tmp_path / "no" / "dir" / "r.csv")


def test_aggregate_recomputes_exactly(sp3, model3, tmp_path):
    records, metrics = run_experiment(sp3[:10], ["hdwr"], SearchConfig(wmin=model3), seed=4)
    again = aggregate("hdwr", [r for r in records if r.algo == "hdwr"])
    assert again == metrics["hdwr"]


def test_nearest_rank():
    assert nearest_rank(list(range(1, 101)), 99) == 99
    assert nearest_rank([5], 99) == 5
    assert nearest_rank([1, 2, 3, 4], 50) == 2
    with pytest.raises(ValueError):
        nearest_rank([], 50)


def test_percentile_reports():
    items = gen_dataset(DatasetSpec("s1", 3, 200, seed=82))
    words = [it.word for it in items if it.automorphisms]
    assert percentile_report(words, "nielsen-first") >= 0.6 * 24
    with pytest.raises(ValueError):
        percentile_report([], "max-edge")
    with pytest.raises(ValueError):
        percentile_report(words, "centroid")


def test_percentile_on_crafted_word():
    u = Word.parse("x1 X2", 2)  # N(x1->x1*x2), the first Nielsen map, shortens it
    assert first_reducer_positions([u], "nielsen-first") == [1]
    assert percentile_report([u], "nielsen-first") == 1


def test_centroid_percentile(model3):
    items = gen_dataset(DatasetSpec("s1", 3, 200, seed=83))
    words = [it.word for it in items if it.automorphisms]
    assert percentile_report(words, "centroid", centroids=model3.centroids) <= 3
    assert nielsen_reducible_fraction(words) >= 0.95
