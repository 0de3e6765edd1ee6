import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticeconcat.channel import stream
from latticeconcat.exceptions import BadParams, LengthMismatch, SamplingExhausted
from latticeconcat.expander import (BipartiteGraph, ExpanderCode, expander_build, expander_encode, lemma_threshold,
                                    random_regular_bipartite, second_eigenvalue, zemor_decode)
from latticeconcat.galois import build_ext_field
from latticeconcat.reed_solomon import RSCode

F25 = build_ext_field(5, 2)


_CACHE = {}


def _cached_code(g):
    key = g.edges.tobytes()
    if key not in _CACHE:
        _CACHE[key] = ExpanderCode(g, RSCode(F25, 8, 5))
    return _CACHE[key]


def complete(delta):
    return BipartiteGraph.from_edges(list(itertools.product(range(delta), repeat=2)), delta, delta)


@pytest.fixture(scope="module")
def code_8_50():
    g = random_regular_bipartite(8, 50, stream(0, 7, 400))
    return ExpanderCode(g, RSCode(F25, 8, 5))


def test_complete_graph_spectrum():
    g = complete(4)
    assert abs(second_eigenvalue(g)) < 1e-9
    ev = np.linalg.eigvalsh(g.adjacency())
    assert math.isclose(ev[-1], 4)


def test_random_graph_is_regular_and_spectral():
    g = random_regular_bipartite(8, 50, stream(1, 7))
    assert g.num_edges == 400
    assert np.all(np.bincount(g.edges[:, 0]) == 8) and np.all(np.bincount(g.edges[:, 1]) == 8)
    assert len({tuple(e) for e in g.edges.tolist()}) == 400
    assert second_eigenvalue(g) <= 2 * math.sqrt(7) + 0.1
    assert math.isclose(np.linalg.eigvalsh(g.adjacency())[-1], 8)


def test_incidence_lists_sorted():
    g = random_regular_bipartite(4, 12, stream(2, 7))
    for inc in (g.inc_a, g.inc_b):
        assert np.all(np.diff(inc, axis=1) > 0)
    assert np.all(g.edges[g.inc_b][..., 1] == np.arange(12)[:, None])


def test_graph_params():
    with pytest.raises(BadParams):
        random_regular_bipartite(2, 10, 0)
    with pytest.raises(BadParams):
        random_regular_bipartite(5, 4, 0)
    with pytest.raises(SamplingExhausted):
        random_regular_bipartite(4, 30, stream(3, 7), lambda_target=0.5)


def test_graph_validation():
    with pytest.raises(BadParams):
        BipartiteGraph.from_edges([(0, 0), (0, 0), (1, 1), (1, 1)], 2, 2)
    with pytest.raises(BadParams):
        BipartiteGraph.from_edges([(0, 0), (0, 1), (1, 0)], 2, 2)


def test_graph_serialization():
    g = random_regular_bipartite(3, 6, stream(4, 7))
    h = BipartiteGraph.from_dict(g.to_dict())
    assert np.array_equal(g.edges, h.edges) and np.array_equal(g.inc_b, h.inc_b)


def test_complete_graph_code_dimension():
    code = expander_build(complete(4), RSCode(F25, 4, 3))
    assert code.N == 16
    assert code.dimension >= 8
    assert code.lam == pytest.approx(0, abs=1e-9)


def test_full_local_code():
    code = ExpanderCode(complete(4), RSCode(F25, 4, 4))
    assert code.dimension == 16


def test_local_length_mismatch():
    with pytest.raises(LengthMismatch):
        ExpanderCode(complete(4), RSCode(F25, 5, 3))


def test_dimension_bound_and_membership(code_8_50):
    c = code_8_50
    assert c.dimension >= c.N * (1 - 2 * 3 / 8)
    rng = stream(5, 0)
    words = c.encode(rng.integers(0, 25, (20, c.dimension)))
    for w in words:
        assert c.is_codeword(w)
        # the generator-basis test agrees with the local tests
        assert c._code.is_codeword(w)
    assert c.is_codeword(np.zeros(c.N, dtype=np.int64))
    bad = words[0].copy()
    bad[0] = (bad[0] + 1) % 25
    assert not c.is_codeword(bad) and not c._code.is_codeword(bad)
    assert c.unsatisfied(bad) == 2


def test_encode_inverse(code_8_50):
    m = stream(6, 0).integers(0, 25, code_8_50.dimension)
    assert np.array_equal(code_8_50.message_of(expander_encode(code_8_50, m)), m)
    with pytest.raises(LengthMismatch):
        code_8_50.encode(m[:-1])


def test_clean_codeword_unchanged(code_8_50):
    w = code_8_50.encode(stream(7, 0).integers(0, 25, code_8_50.dimension))
    trace = []
    assert np.array_equal(zemor_decode(code_8_50, w, trace=trace), w)
    assert len(trace) == 2


def test_lemma_threshold_formula():
    assert lemma_threshold(0.5, 400, 0.0, 8) == pytest.approx(0.9 * 0.5 * 200 * 0.25)
    assert lemma_threshold(0.5, 400, 5.0, 8) < 0


def test_unsatisfied_never_increases(code_8_50):
    rng = stream(8, 0)
    for _ in range(20):
        w = code_8_50.encode(rng.integers(0, 25, code_8_50.dimension))
        pos = rng.choice(code_8_50.N, 40, replace=False)
        w[pos] = (w[pos] + rng.integers(1, 25, 40)) % 25
        trace = []
        zemor_decode(code_8_50, w, trace=trace)
        assert all(after <= before for before, after in trace)


@given(st.integers(0, 2**31 - 1), st.integers(0, 10))
def test_low_weight_errors_corrected(seed, weight):
    g = random_regular_bipartite(8, 50, stream(0, 7, 400))
    code = _cached_code(g)
    rng = np.random.default_rng(seed)
    w = code.encode(rng.integers(0, 25, code.dimension))
    r = w.copy()
    pos = rng.choice(code.N, weight, replace=False)
    r[pos] = F25.add(r[pos], rng.integers(1, 25, weight))
    assert np.array_equal(code.decode(r), w)


@given(st.integers(0, 2**31 - 1))
def test_encoding_is_linear(seed):
    code = _cached_code(random_regular_bipartite(8, 50, stream(0, 7, 400)))
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, 25, (2, code.dimension))
    assert np.array_equal(code.encode(F25.add(a, b)), F25.add(code.encode(a), code.encode(b)))
