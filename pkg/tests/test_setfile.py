import numpy as np
import pytest

from avoidlab.constructions import BandSet, build_AR
from avoidlab.geometry import BoxUnion
from avoidlab.graham import GridSet
from avoidlab.setfile import (SetFileError, format_csv, format_gridset, format_set, parse_csv,
                              parse_gridset, parse_set, read_set, write_set)


def test_band_round_trip_is_exact(tmp_path):
    B = build_AR(64)
    p = tmp_path / "a.txt"
    write_set(p, B)
    C = read_set(p)
    assert isinstance(C, BandSet) and C.R == B.R and C.bands == B.bands


def test_box_round_trip(rng):
    U = BoxUnion.from_tuples([(0, 1, 0, 0.5), (0.1 * np.pi, 2, 1, 3)], normalize=False)
    V = parse_set(format_set(U))
    assert [b.as_tuple() for b in V.boxes] == [b.as_tuple() for b in U.boxes]
    assert V.measure() == U.measure()


def test_comments_and_blank_lines():
    S = parse_set("# header\n\nbounds 0 8 0 8  # square\nband 4 4.125\n")
    assert S.bands == [(4.0, 4.125)]


@pytest.mark.parametrize("text", [
    "bounds 0 8 0 8\nband 4 4.125\nbox 0 1 0 1\n",   # mixed records
    "bounds 0 8 0 9\nband 4 4.125\n",                 # non-square bounds for bands
    "band 4 4.125\n",                                 # bands without bounds
    "bounds 0 8 0 8\nbox 0 1 0\n",                    # wrong arity
    "bounds 0 8 0 8\nblob 1 2\n",                     # unknown record
    "bounds 0 8 0 8\nbox 0 a 0 1\n",                  # non-numeric
    "",                                               # empty
])
def test_malformed_set_files(text):
    with pytest.raises(SetFileError):
        parse_set(text)


def test_gridset_round_trip(rng):
    B = GridSet(9, rng.random((9, 9)) < 0.3)
    C = parse_gridset(format_gridset(B))
    assert C.n == B.n and np.array_equal(C.mask, B.mask)
    with pytest.raises(SetFileError):
        parse_gridset("gridset 3\n5 1\n")
    with pytest.raises(SetFileError):
        parse_gridset("0 1\n")


def test_csv_round_trip_and_checks():
    text = format_csv(["a", "b", "ok"], [(1, 0.1, True), (2, float("nan"), False)])
    header, rows = parse_csv(text, ["a", "ok"])
    assert header == ["a", "b", "ok"] and rows[0] == ["1", "0.1", "1"] and rows[1][2] == "0"
    with pytest.raises(SetFileError):
        parse_csv(text, ["missing"])
    with pytest.raises(SetFileError):
        parse_csv("a,b\n1\n")
    with pytest.raises(ValueError):
        format_csv(["a"], [(1, 2)])
