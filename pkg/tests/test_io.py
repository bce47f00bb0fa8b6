import json
from fractions import Fraction

import numpy as np
import pytest

from qdiv import io
from qdiv.errors import DomainError, ParseError


def test_parse_real_and_complex():
    m = io.parse_matrix({"n": 2, "re": [[2, 1], [1, 1]]})
    assert m.is_real and m.n == 2
    c = io.parse_matrix({"n": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0.5], [-0.5, 0]]})
    assert not c.is_real and c.array[0, 1] == 0.5j


def test_rational_entries():
    m = io.parse_matrix({"n": 1, "re": [[{"num": 1, "den": 4}]]})
    assert m.array[0, 0] == 0.25
    rows = io.parse_rational_matrix({"n": 2, "re": [[{"num": 1, "den": 40}, 0], [0, 3]]})
    assert rows[0][0] == Fraction(1, 40)


@pytest.mark.parametrize("obj", [
    [1, 2],
    {"n": 2},
    {"n": 2, "re": [[1, 2]]},
    {"n": 0, "re": []},
    {"n": 1, "re": [["x"]]},
    {"n": 1, "re": [[{"num": 1, "den": 0}]]},
    {"n": 1, "re": [[{"num": 1.5, "den": 2}]]},
])
def test_malformed(obj):
    with pytest.raises(ParseError):
        io.parse_matrix(obj)


def test_rational_rejects_inexact_floats_and_asymmetry():
    with pytest.raises(ParseError):
        io.parse_rational_matrix({"n": 1, "re": [[0.1]]})
    with pytest.raises(ParseError):
        io.parse_rational_matrix({"n": 2, "re": [[1, 2], [3, 1]]})


def test_matrices_container_forms(tmp_path):
    one = {"n": 1, "re": [[2.0]]}
    assert len(io.parse_matrices(one)) == 1
    assert len(io.parse_matrices([one, one])) == 2
    assert len(io.parse_matrices({"matrices": [one]})) == 1
    p = tmp_path / "m.json"
    p.write_text(json.dumps([one]))
    assert io.load_matrices(p)[0].array[0, 0] == 2.0
    with pytest.raises(ParseError):
        io.load_matrices(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ParseError):
        io.load_matrices(tmp_path / "bad.json")


def test_matrix_roundtrip():
    a = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
    d = io.matrix_to_dict(a)
    np.testing.assert_array_equal(io.parse_matrix(json.loads(json.dumps(d))).array, a)


def test_certify_instance():
    obj = {"points": [{"n": 3, "re": [[2, 1, 0], [1, 1, 0], [0, 0, {"num": 1, "den": 2}]]},
                      {"n": 3, "re": [[1, 0, 0], [0, 1, 0], [0, 0, 0]]}],
           "c": [1, -1], "tau_denominator": 3}
    pts, c, tau = io.parse_certify_instance(obj)
    assert pts[0].tail == (Fraction(1, 2),) and c == [1, -1] and tau == 3
    bad = dict(obj, points=[{"n": 3, "re": [[2, 1, 1], [1, 1, 0], [1, 0, 1]]}])
    with pytest.raises(ParseError):
        io.parse_certify_instance(bad)
    with pytest.raises(ParseError):
        io.parse_certify_instance({"points": [], "c": [0.5]})
    neg = dict(obj, points=[{"n": 3, "re": [[2, 1, 0], [1, 1, 0], [0, 0, -1]]}])
    with pytest.raises(DomainError):
        io.parse_certify_instance(neg)
