import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torusfact.document import (load_document, parse_document, read_samples, serialize,
                                write_samples)
from torusfact.errors import DuplicateTerm, IndexArityMismatch, MalformedField
from torusfact.grid import SampledMap
from torusfact.series import MatrixSeries, ScalarSeries

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def matrix_series(draw):
    k = draw(st.integers(1, 3))
    n = draw(st.integers(1, 3))
    idx = st.tuples(*[st.integers(-4, 4)] * k)
    coeffs = {}
    for j in draw(st.lists(idx, max_size=5, unique=True)):
        flat = draw(st.lists(st.builds(complex, finite, finite), min_size=n * n, max_size=n * n))
        coeffs[j] = np.array(flat).reshape(n, n)
    return MatrixSeries(n, k, coeffs)


def doc(terms, k=1, n=1, row=0, col=0):
    body = {"k": k, "n": n, "entries": [{"row": row, "col": col, "terms": terms}]}
    return json.dumps(body, indent=1)


class TestRoundTrip:
    def test_character(self):
        a = ScalarSeries.character((1, 0))
        text = serialize(a)
        back = parse_document(text)
        assert back.n == 1 and back.dim == 2
        assert list(back.coeffs) == [(1, 0)]
        assert serialize(back) == text

    @given(matrix_series())
    def test_fuzz(self, a):
        text = serialize(a)
        back = parse_document(text)
        assert back == a
        assert serialize(back) == text

    def test_one_term_per_line(self):
        a = MatrixSeries(2, 1, {(0,): np.eye(2), (3,): np.ones((2, 2))})
        lines = [ln for ln in serialize(a).splitlines() if '"index"' in ln]
        assert len(lines) == 6

    def test_load(self, tmp_path):
        p = tmp_path / "a.json"
        p.write_text(serialize(ScalarSeries.character((2,))))
        assert load_document(p) == MatrixSeries(1, 1, {(2,): [[1.0]]})


class TestErrors:
    def test_duplicate_term(self):
        text = doc([{"index": [1], "re": 1, "im": 0}, {"index": [1], "re": 2, "im": 0}])
        with pytest.raises(DuplicateTerm) as err:
            parse_document(text)
        index_lines = [i + 1 for i, ln in enumerate(text.splitlines()) if '"index"' in ln]
        assert err.value.line == index_lines[1]

    def test_arity(self):
        text = doc([{"index": [1, 2], "re": 1, "im": 0}])
        with pytest.raises(IndexArityMismatch) as err:
            parse_document(text)
        assert err.value.line is not None and "line" in str(err.value)

    def test_bad_json(self):
        with pytest.raises(MalformedField) as err:
            parse_document('{"k": 1,\n "n": }')
        assert err.value.line == 2

    @pytest.mark.parametrize("term", [{"index": [0], "re": "x", "im": 0},
                                      {"index": [0.5], "re": 1, "im": 0},
                                      {"re": 1, "im": 0}])
    def test_malformed_term(self, term):
        with pytest.raises(MalformedField):
            parse_document(doc([term]))

    def test_entry_outside_matrix(self):
        with pytest.raises(MalformedField):
            parse_document(doc([], row=2))

    def test_missing_k(self):
        with pytest.raises(MalformedField):
            parse_document('{"n": 1, "entries": []}')


class TestSamples:
    def test_round_trip(self, tmp_path, rng):
        s = rng.normal(size=(4, 5, 6, 2, 2)) + 1j * rng.normal(size=(4, 5, 6, 2, 2))
        p = tmp_path / "x.bin"
        write_samples(p, SampledMap(s))
        assert np.array_equal(read_samples(p).samples, s)
        assert p.stat().st_size == 8 * 6 + 16 * s.size

    def test_truncated(self, tmp_path, rng):
        p = tmp_path / "x.bin"
        write_samples(p, SampledMap(np.ones((4, 4, 4, 1, 1), dtype=complex)))
        p.write_bytes(p.read_bytes()[:-3])
        with pytest.raises(MalformedField):
            read_samples(p)
