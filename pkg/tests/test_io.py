from fractions import Fraction

import numpy as np
import pytest

from sawtorus.io import format_value, pgm_bytes, read_pgm, write_csv, write_manifest, write_pgm


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.float64(2.0)) == "2"
    assert format_value(Fraction(3, 2)) == "3/2"
    assert format_value(None) == "n/a"
    assert format_value(True) == "true"
    assert format_value(7) == "7"


def test_empty_rows_give_header_only(tmp_path):
    write_csv(tmp_path / "e.csv", ["a", "b"], [])
    assert (tmp_path / "e.csv").read_text() == "a,b\n"


def test_pgm_example(tmp_path):
    levels, lo, hi = pgm_bytes([[0, 0.5], [0.5, 1]])
    assert levels.ravel().tolist() == [0, 128, 128, 255]
    write_pgm(tmp_path / "r.pgm", [[0, 0.5], [0.5, 1]])
    data = (tmp_path / "r.pgm").read_bytes()
    assert data == b"P5\n2 2\n255\n" + bytes([0, 128, 128, 255])
    assert (tmp_path / "r.range.txt").read_text() == "min 0\nmax 1\n"
    assert read_pgm(tmp_path / "r.pgm").tolist() == [[0, 128], [128, 255]]


def test_pgm_constant_and_invalid():
    assert pgm_bytes(np.full((3, 3), 4.0))[0].max() == 0
    with pytest.raises(ValueError):
        pgm_bytes([1.0, 2.0])
    with pytest.raises(ValueError):
        pgm_bytes([[np.nan, 1.0]])


def test_manifest_sorted(tmp_path):
    write_manifest(tmp_path / "m.txt", {"seed": 0, "alpha": Fraction(1, 2), "eps": 0.05})
    assert (tmp_path / "m.txt").read_text() == "alpha = 1/2\neps = 0.050000000000000003\nseed = 0\n"
