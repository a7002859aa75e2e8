import json
import math

import numpy as np
import pytest

from grace_fir import io
from grace_fir.filter import FilterSpec, coefficients


def test_fmt():
    assert io.fmt(0.1) == "0.10000000000000001"
    assert io.fmt(float("nan")) == "NaN"
    assert io.fmt(-math.inf) == "-Infinity"


def test_csv_round_trip_is_exact():
    c = coefficients(FilterSpec.of(37, 11, 4))
    back = io.parse_csv_taps(io.taps_to_csv(c))
    assert np.array_equal(back, c)


def test_csv_comments_and_blanks():
    text = "# taps\n\n-1,0.25\n0,0.5\n  \n1,0.25\n"
    assert io.parse_csv_taps(text).tolist() == [0.25, 0.5, 0.25]


@pytest.mark.parametrize("text, line", [
    ("-1,0.25\n0,0.5\n", 2),            # even count
    ("-1,0.25\n0,x\n1,0.25\n", 2),      # not a number
    ("-1,0.25\n1,0.5\n2,0.25\n", 2),    # wrong index
    ("-1;0.25\n", 1),                   # wrong separator
    ("# nothing\n", 0),
])
def test_csv_errors_carry_line(text, line):
    with pytest.raises(io.ParseError) as err:
        io.parse_csv_taps(text, "f.csv")
    assert err.value.line == line
    assert str(err.value).startswith(f"f.csv:{line}:")


def test_json_round_trip(tmp_path):
    c = coefficients(FilterSpec.of(9, 3, 1))
    doc = {"spec": {"m": 9, "n": 3, "p": 1}, "metrics": {"x": float("nan")}, "coefficients": list(c)}
    path = tmp_path / "f.json"
    path.write_text(io.document_to_json(doc))
    taps, back = io.load_taps(path)
    assert np.array_equal(taps, c)
    assert back["format_version"] == io.FORMAT_VERSION
    assert math.isnan(back["metrics"]["x"])


def test_json_errors():
    good = {"spec": {"m": 1, "n": 1, "p": 0}, "coefficients": [0.0, 1.0, 0.0]}
    assert io.parse_document(io.document_to_json(good))["coefficients"].size == 3
    with pytest.raises(io.ParseError, match="format_version"):
        io.parse_document(json.dumps({"coefficients": [1.0]}))
    with pytest.raises(io.ParseError, match="expected 5"):
        io.parse_document(json.dumps({"format_version": 1, "spec": {"m": 2},
                                      "coefficients": [0.0, 1.0, 0.0]}))
    with pytest.raises(io.ParseError):
        io.parse_document("{not json")


def test_load_csv(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("-1,0.25\n0,0.5\n1,0.25\n")
    taps, doc = io.load_taps(path)
    assert doc is None and taps.size == 3
