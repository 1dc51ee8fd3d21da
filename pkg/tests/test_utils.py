from fractions import Fraction

import numpy as np
import pytest

from utils import fraction_str, make_rng, map_batches, parse_fraction, parse_fraction_list, resolve_threads, seed_record, seed_split
from utils.parallel import THREADS_ENV


def test_seed_split_is_stable():
    assert seed_split(42, "embed") == seed_split(42, "embed")
    assert seed_split(42, "embed") != seed_split(42, "embed/1")
    assert seed_split(42, "embed") != seed_split(43, "embed")
    assert 0 <= seed_split(0, "x") < 1 << 64
    with pytest.raises(ValueError):
        seed_split(-1, "x")
    with pytest.raises(ValueError):
        seed_split(1 << 64, "x")


def test_streams_are_reproducible():
    assert np.array_equal(make_rng(7, "gff").random(5), make_rng(7, "gff").random(5))
    record = seed_record(7, "gff")
    assert record == {"master": 7, "stream": "gff", "child": seed_split(7, "gff")}


def test_thread_precedence(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert resolve_threads(None) == 1
    assert resolve_threads(None, 3) == 3
    monkeypatch.setenv(THREADS_ENV, "5")
    assert resolve_threads(None, 3) == 5
    assert resolve_threads(2, 3) == 2
    assert resolve_threads(0) == 1
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(ValueError):
        resolve_threads(None)


def test_map_batches_keeps_order():
    assert map_batches(abs, [-3, 1, -2]) == [3, 1, 2]
    assert map_batches(abs, [-3, 1, -2, 4], threads=2) == [3, 1, 2, 4]


def test_fractions():
    assert parse_fraction("1/64") == Fraction(1, 64)
    assert parse_fraction(" 0.25 ") == Fraction(1, 4)
    assert parse_fraction_list("1/8,1/16,") == [Fraction(1, 8), Fraction(1, 16)]
    assert fraction_str(Fraction(3, 1)) == "3"
    assert fraction_str(Fraction(1, 64)) == "1/64"
    for bad in ("abc", "1/0"):
        with pytest.raises(ValueError):
            parse_fraction(bad)
    with pytest.raises(ValueError):
        parse_fraction_list(" , ")
