import numpy as np
import pytest

from whmin.automorphisms import apply_sequence
from whmin.datasets import DatasetError, DatasetSpec, gen_dataset, read_dataset, write_dataset
from whmin.engines import wr
from whmin.words import Word, is_rotation


def test_spec_validation():
    with pytest.raises(DatasetError):
        DatasetSpec("s2", 3, 10)
    with pytest.raises(DatasetError):
        DatasetSpec("s1", 3, 0)
    assert DatasetSpec("s10", 3, 1).aut_range == (1, 10)
    assert DatasetSpec("s1", 3, 1).aut_range == (1, 1)
    assert DatasetSpec("sp", 3, 1).aut_range == (1, 20)


def test_sp_words_start_from_a_letter():
    items = gen_dataset(DatasetSpec("sp", 3, 40, seed=1))
    assert len(items) == 40
    for it in items:
        assert len(it.base) == 1 and it.oracle_min_length == 1
        assert it.word.is_cyclically_reduced() and 1 <= len(it.automorphisms) <= 20
        assert apply_sequence(it.automorphisms, it.base) == it.word
        assert len(it.word) <= 1000


def test_sp_is_primitive_by_wr():
    for rank in (3, 4, 5):
        for it in gen_dataset(DatasetSpec("sp", rank, 30, seed=rank)):
            assert len(wr(it.word).output) == 1


def test_s1_halves():
    items = gen_dataset(DatasetSpec("s1", 3, 200, seed=2, base_length=(20, 100)))
    minimal = [it for it in items if not it.automorphisms]
    inflated = [it for it in items if it.automorphisms]
    assert len(minimal) == len(inflated) == 100
    assert all(it.oracle_min_length == len(it.word) for it in minimal)
    for it in inflated:
        assert len(it.automorphisms) == 1 and len(it.word) > it.oracle_min_length
        assert len(wr(it.word).output) == it.oracle_min_length


def test_s10_is_longer_than_base():
    for it in gen_dataset(DatasetSpec("s10", 3, 30, seed=3, base_length=(20, 80))):
        assert len(it.word) > len(it.base) == it.oracle_min_length
        assert 1 <= len(it.automorphisms) <= 10
        assert len(wr(it.word).output) == it.oracle_min_length


def test_uncertified_ranks_have_no_oracle():
    items = gen_dataset(DatasetSpec("s1", 6, 4, seed=4))
    assert all(it.oracle_min_length is None for it in items)


def test_generation_is_deterministic_and_job_independent():
    spec = DatasetSpec("s10", 3, 12, seed=5, base_length=(10, 40))
    a, b = gen_dataset(spec), gen_dataset(spec, jobs=3)
    assert [it.word for it in a] == [it.word for it in b]
    assert [it.word for it in a] != [it.word for it in gen_dataset(DatasetSpec("s10", 3, 12, seed=6, base_length=(10, 40)))]


def test_retry_exhaustion():
    spec = DatasetSpec("s1", 3, 2, seed=1, base_length=(50, 60), max_length=40)
    with pytest.raises(DatasetError):
        gen_dataset(spec)


def test_file_round_trip(tmp_path):
    items = gen_dataset(DatasetSpec("s10", 3, 10, seed=7, base_length=(10, 40)))
    path = tmp_path / "d.txt"
    write_dataset(path, 3, items, header="test set")
    rank, back = read_dataset(path)
    assert rank == 3
    for a, b in zip(items, back):
        assert a.word == b.word and a.base == b.base
        assert a.automorphisms == b.automorphisms and a.oracle_min_length == b.oracle_min_length


def test_reader_contract(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("# comment\nrank=2\nx1 x2\n\nX1 X2 X1\n")
    rank, items = read_dataset(path)
    assert rank == 2 and [str(i.word) for i in items] == ["x1 x2", "", "X1 X2 X1"]
    path.write_text("rank=2\nx1 X1\n")
    with pytest.raises(DatasetError):
        read_dataset(path)
    path.write_text("rank=2\nx1 x2 X1\n")
    with pytest.raises(DatasetError):
        read_dataset(path)
    assert str(read_dataset(path, normalize=True)[1][0].word) == "x2"
    path.write_text("x1 x2\n")
    with pytest.raises(DatasetError):
        read_dataset(path)
    with pytest.raises(DatasetError):
        read_dataset(tmp_path / "missing.txt")
