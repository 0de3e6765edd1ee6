import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticeconcat.channel import gaussian_mac, stream
from latticeconcat.compute_forward import (SIGMA2_MIN, CFSystem, build_cf_system, cf_alpha, cf_decode,
                                           cf_encode_all, cf_rate, combine_symbols, estimate_relay_pe,
                                           lattice_combination_label)
from latticeconcat.concat import build_rs_concat
from latticeconcat.exceptions import DegenerateCoefficients, LengthMismatch
from latticeconcat.galois import build_ext_field
from latticeconcat.inner import build_inner_codec
from latticeconcat.lattice import build_nested_pair
from latticeconcat.linear_code import LinearCode, random_code

F5 = build_ext_field(5)


def test_alpha_and_rate_example():
    assert cf_alpha(10, 1, [1, 1], [1, 1]) == pytest.approx(20 / 21)
    assert cf_rate(10, 1, [1, 1], [1, 1]) == pytest.approx(0.5 * math.log2(10.5))
    assert cf_rate(10, 1, [1, 1], [1, 1]) == pytest.approx(1.696, abs=1e-3)


def test_single_user_is_capacity():
    for P, s2 in [(1, 1), (10, 0.3), (0.5, 2)]:
        assert cf_rate(P, s2, [1], [1]) == pytest.approx(0.5 * math.log2(1 + P / s2))


def test_rate_cap():
    cap = 0.5 * math.log2(1 + 10 / SIGMA2_MIN)
    assert cf_rate(10, 0, [1, 2], [1, 2]) == pytest.approx(cap)


def test_degenerate_coefficients():
    with pytest.raises(DegenerateCoefficients):
        cf_rate(10, 1, [1, 1], [0, 0])
    with pytest.raises(DegenerateCoefficients):
        cf_rate(1, 1, [1, 1], [5, -5])
    with pytest.raises(LengthMismatch):
        cf_rate(1, 1, [1, 1], [1])


def test_combine_symbols():
    F = build_ext_field(5, 2)
    s = np.array([[3, 7], [11, 24]])
    out = combine_symbols(F, s, [2, -1])
    assert out.tolist() == F.add(F.scalar_mul(2, s[0]), F.scalar_mul(4, s[1])).tolist()


@given(st.integers(0, 2**31 - 1))
def test_lattice_homomorphism(seed):
    rng = np.random.default_rng(seed)
    pair = build_nested_pair(random_code(F5, 3, 2, rng), beta=float(rng.uniform(0.3, 2)))
    L = int(rng.integers(1, 4))
    a = rng.integers(-7, 8, L)
    m = rng.integers(0, 5, (L, 2))
    assert np.array_equal(lattice_combination_label(pair, m, a), np.mod(np.mod(a, 5) @ m, 5))


@pytest.fixture(scope="module")
def system():
    pair = build_nested_pair(LinearCode(F5, [[1, 2]]), beta=1.0)
    code = build_rs_concat(build_inner_codec(pair, noise_var=0.0, alpha=1.0), 2, dither_seed=2)
    return build_cf_system(code, [1, 3], [1, 3], 0.0, alpha=1.0)


def test_noiseless_cf(system):
    msgs = stream(3, 0).integers(0, 5, (2, 100, 2))
    u, t = cf_encode_all(system, msgs)
    w = np.tensordot(system.h, u, axes=1)
    out, ok = system.decode_batch(w, t)
    assert ok.all() and np.array_equal(out, system.combine(msgs))
    assert np.array_equal(cf_decode(system, w[0], t[:, 0]), system.combine(msgs[:, 0]))


def test_single_message_shapes(system):
    u, t = system.encode_all(np.array([[1, 2], [3, 4]]))
    assert u.shape == (2, 8) and t.shape == (2, 4, 2)
    with pytest.raises(LengthMismatch):
        system.encode_all(np.zeros((3, 2), dtype=np.int64))


def test_sources_use_independent_dithers(system):
    assert not np.array_equal(system.dithers(0, [0]), system.dithers(1, [0]))


def test_non_integer_coefficients(system):
    with pytest.raises(ValueError):
        CFSystem(system.code, [1, 1], [1.5, 1])


def test_noisy_cf_small_error():
    pair = build_nested_pair(random_code(build_ext_field(11), 1, 1, stream(0, 0)), beta=2 / 11)
    inner = build_inner_codec(pair, power=1.0, noise_var=1e-3)
    code = build_rs_concat(inner, 8, dither_seed=5)
    sys_ = CFSystem(code, [1, 1], [1, 1], 1e-3)
    msgs = stream(6, 0).integers(0, 11, (2, 500, 8))
    u, t = sys_.encode_all(msgs)
    w = gaussian_mac(list(u), sys_.h, 1e-3, stream(6, 1))
    out, ok = sys_.decode_batch(w, t)
    errors = int((~ok | np.any(out != sys_.combine(msgs), axis=1)).sum())
    assert errors <= 10


def test_relay_error_estimate_noiseless():
    pair = build_nested_pair(LinearCode(F5, [[1, 2]]), beta=1.0)
    inner = build_inner_codec(pair, noise_var=0.0, alpha=1.0)
    est = estimate_relay_pe(inner, [1, 2], [1, 2], 0.0, 1.0, 3000, seed=0)
    assert est.errors == 0
