"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (also repeated in
the terminal summary) and then asserts the same verdict.
"""

import itertools
import math
import time

import numpy as np
import pytest

from latticeconcat._stats import loglog_slope
from latticeconcat.channel import stream
from latticeconcat.compute_forward import CFSystem, cf_rate, lattice_combination_label
from latticeconcat.concat import build_expander_concat, build_rs_concat
from latticeconcat.exceptions import DecodeFailure
from latticeconcat.expander import ExpanderCode, random_regular_bipartite, second_eigenvalue, zemor_decode
from latticeconcat.galois import build_ext_field
from latticeconcat.harness import run_experiment
from latticeconcat.inner import build_inner_codec, estimate_inner_pe
from latticeconcat.lattice import build_nested_pair
from latticeconcat.linear_code import LinearCode, random_code
from latticeconcat.reed_solomon import RSCode
from latticeconcat.verify import brute_force_closest

pytestmark = pytest.mark.acceptance


def test_criterion_01_quantizer_oracle(criterion):
    start = time.perf_counter()
    configs = [(2, 2, 1, 1.0), (2, 4, 2, 0.7), (3, 3, 2, 0.5), (3, 4, 1, 2.0), (5, 2, 1, 1.3), (5, 3, 2, 0.4),
               (5, 4, 2, 0.9)]
    mismatches = points = 0
    for p, n, k, beta in configs:
        rng = stream(101, p, n, k)
        pair = build_nested_pair(random_code(build_ext_field(p), n, k, rng), beta=beta)
        x = rng.uniform(-2 * beta * p, 2 * beta * p, (1000, n))
        d_fast = ((pair.fine.closest_point(x) - x) ** 2).sum(1)
        d_ref = ((brute_force_closest(pair, x, window=2) - x) ** 2).sum(1)
        mismatches += int(np.sum(~np.isclose(d_fast, d_ref, rtol=0, atol=1e-9)))
        points += len(x)
    elapsed = time.perf_counter() - start
    ok = criterion(1, mismatches == 0 and elapsed < 60,
                   f"{mismatches} mismatches over {points} points, {len(configs)} configs [{elapsed:.1f}s]")
    assert ok


def test_criterion_02_coset_isomorphism(criterion):
    start = time.perf_counter()
    configs = [(2, 4, 3), (3, 3, 2), (5, 3, 2), (7, 3, 3), (3, 7, 6)]
    violations = 0
    for p, n, k in configs:
        pair = build_nested_pair(random_code(build_ext_field(p), n, k, stream(102, p, n)), beta=0.9)
        labels = pair.all_labels()
        pts = pair.label_to_coset(labels)
        # bijective: every label maps back to itself and the points are distinct
        violations += int(np.sum(np.any(pair.coset_to_label(pts) != labels, axis=1)))
        violations += len(labels) - len(np.unique(np.round(pts, 6), axis=0))
        # additive on every pair of labels
        i, j = np.divmod(np.arange(len(labels) ** 2), len(labels))
        for s in range(0, len(i), 1 << 17):
            a, b = i[s:s + 1 << 17], j[s:s + 1 << 17]
            got = pair.coset_to_label(pair.coarse.mod(pts[a] + pts[b]))
            violations += int(np.sum(np.any(got != (labels[a] + labels[b]) % p, axis=1)))
    elapsed = time.perf_counter() - start
    ok = criterion(2, violations == 0 and elapsed < 60,
                   f"{violations} violations, exhaustive up to p^k=729 [{elapsed:.1f}s]")
    assert ok


def test_criterion_03_noiseless_identity(criterion):
    start = time.perf_counter()
    draws = 10_000
    F5 = build_ext_field(5)
    pair = build_nested_pair(random_code(F5, 2, 2, stream(103, 0)), beta=0.5)
    inner = build_inner_codec(pair, noise_var=0.0, alpha=1.0)
    errors = {}

    rng = stream(103, 1)
    labels = rng.integers(0, 5, (draws, 2))
    t = pair.dither_sample(rng, draws)
    errors["inner"] = int(np.any(inner.decode(inner.encode(labels, t), t) != labels, axis=1).sum())

    rs = build_rs_concat(inner, 12, dither_seed=4)
    msgs = stream(103, 2).integers(0, 25, (draws, 12))
    x, t = rs.encode(msgs)
    out, ok = rs.decode_batch(x, t)
    errors["rs"] = int(np.sum(~ok | np.any(out != msgs, axis=1)))

    graph = random_regular_bipartite(8, 10, stream(103, 7))
    ex = build_expander_concat(inner, graph, 5, dither_seed=5)
    msgs = stream(103, 3).integers(0, 25, (draws, ex.dimension))
    x, t = ex.encode(msgs)
    out, ok = ex.decode_batch(x, t)
    errors["expander"] = int(np.sum(~ok | np.any(out != msgs, axis=1)))

    system = CFSystem(rs, [1, 2], [1, 2], 0.0, alpha=1.0)
    msgs = stream(103, 4).integers(0, 25, (2, draws, 12))
    u, t = system.encode_all(msgs)
    out, ok = system.decode_batch(np.tensordot(system.h, u, axes=1), t)
    errors["cf"] = int(np.sum(~ok | np.any(out != system.combine(msgs), axis=1)))

    elapsed = time.perf_counter() - start
    detail = ", ".join(f"{k} {v}/{draws}" for k, v in errors.items())
    ok = criterion(3, sum(errors.values()) == 0 and elapsed < 120, f"errors: {detail} [{elapsed:.1f}s]")
    assert ok


def test_criterion_04_rs_radius(criterion):
    start = time.perf_counter()
    F = build_ext_field(7)
    C = RSCode(F, 6, 2)
    cases = wrong = 0
    for m in itertools.product(range(7), repeat=2):
        c = C.encode(np.array(m))
        for w in (0, 1, 2):
            for pos in itertools.combinations(range(6), w):
                for vals in itertools.product(range(1, 7), repeat=w):
                    r = c.copy()
                    r[list(pos)] = F.add(r[list(pos)], np.array(vals, dtype=np.int64))
                    cases += w > 0
                    try:
                        msg, _ = C.decode(r)
                    except DecodeFailure:
                        wrong += 1
                        continue
                    wrong += not np.array_equal(msg, m)
                    wrong += np.count_nonzero(C.encode(msg) != r) > C.t
    elapsed = time.perf_counter() - start
    ok = criterion(4, wrong == 0 and cases == 49 * (36 + 540) and elapsed < 60,
                   f"{wrong} wrong decodes over {cases} error patterns [{elapsed:.1f}s]")
    assert ok


@pytest.fixture(scope="module")
def expander_8_50():
    graph = random_regular_bipartite(8, 50, stream(105, 7))
    # d0 / delta = 1/2 needs d0 = 4, i.e. k0 = 5; F_9 is the smallest field with more than 8 elements
    code = ExpanderCode(graph, RSCode(build_ext_field(3, 2), 8, 5))
    return code


def _inject(code, weight, rng):
    w = code.encode(rng.integers(0, code.field.order, code.dimension))
    r = w.copy()
    pos = rng.choice(code.N, weight, replace=False)
    r[pos] = code.field.add(r[pos], rng.integers(1, code.field.order, weight))
    return w, r


def test_criterion_05_expander_regime(criterion, expander_8_50):
    start = time.perf_counter()
    code = expander_8_50
    lam = second_eigenvalue(code.graph)
    threshold = code.lemma_threshold(0.9)
    # sub-threshold weights are the integers 0 <= w < threshold
    weights = list(range(0, math.ceil(threshold))) if threshold > 0 else []
    decoded = drawn = 0
    rng = stream(105, 0)
    if weights:
        for _ in range(1000):
            w, r = _inject(code, int(rng.choice(weights)), rng)
            decoded += np.array_equal(zemor_decode(code, r), w)
            drawn += 1
    elapsed = time.perf_counter() - start
    ok = (lam <= 2 * math.sqrt(7) + 0.1 and drawn == 1000 and decoded == 1000 and elapsed < 300)
    detail = (f"lambda={lam:.3f} (bound {2 * math.sqrt(7) + 0.1:.3f}), delta0={code.delta0}, "
              f"threshold={threshold:.2f}; {decoded}/{drawn} sub-threshold patterns decoded")
    if not weights:
        detail += "; no error weight lies below a non-positive threshold (needs lambda < 2 at delta0=1/2)"
    assert criterion(5, ok, f"{detail} [{elapsed:.1f}s]"), detail


def test_expander_measured_threshold(expander_8_50):
    """Supplementary: the decoder's empirical radius on the same code is well above zero."""
    code = expander_8_50
    rng = stream(105, 1)
    for weight in (1, 5, 10, 15):
        for _ in range(250):
            w, r = _inject(code, weight, rng)
            assert np.array_equal(zemor_decode(code, r), w), weight


def test_criterion_06_mmse_coefficient(criterion):
    start = time.perf_counter()
    p, n = 2, 4
    pair = build_nested_pair(random_code(build_ext_field(p), n, 2, stream(0, 0)), beta=2 / p)
    P = 1.0
    sigma2 = P / 10 ** (10 / 10)
    trials = 100_000
    mmse = estimate_inner_pe(build_inner_codec(pair, power=P, noise_var=sigma2), trials, seed=1)
    plain = estimate_inner_pe(build_inner_codec(pair, power=P, noise_var=sigma2, alpha=1.0), trials, seed=1)
    elapsed = time.perf_counter() - start
    ok = (0.01 < mmse.p_hat < 0.3 and mmse.p_hat <= plain.p_hat and mmse.ci_hi < plain.ci_lo and elapsed < 600)
    ok = criterion(6, ok, f"MMSE {mmse.p_hat:.4f} [{mmse.ci_lo:.4f}, {mmse.ci_hi:.4f}] vs alpha=1 "
                          f"{plain.p_hat:.4f} [{plain.ci_lo:.4f}, {plain.ci_hi:.4f}], {trials} trials [{elapsed:.1f}s]")
    assert ok


def test_criterion_07_concatenation_trend(criterion):
    start = time.perf_counter()
    snr = 19
    inner_cfg = {"p": 5, "n": 2, "k": 2, "power": 1.0, "code_seed": 0}

    rs_cfg = {"code": dict(inner_cfg, outer={"rs": {"delta": 0.02, "p_in_trials": 100_000}}),
              "sweep": {"snr_db": [snr]}, "trials": 2000, "seed": 1}
    rs = run_experiment(rs_cfg, write=False)[0]
    p_in = rs.planner["p_in_hat"]
    union = 1 - (1 - p_in) ** rs.N_out
    rs_ok = rs.ci_hi < union

    ex_cfg = {"code": dict(inner_cfg, outer={"expander": {"delta_graph": [8, 10, 16, 20], "k0": [5, 6, 9, 11]}}),
              "sweep": {"snr_db": [snr], "N_out": [80, 160, 320, 640]}, "trials": 1000, "seed": 1}
    recs = run_experiment(ex_cfg, write=False)
    monotone = all(b.ci_lo <= a.ci_hi for a, b in zip(recs, recs[1:]))
    N = np.array([r.N_out for r in recs], dtype=float)
    smoothed = np.array([(r.errors + 0.5) / (r.trials + 1) for r in recs])
    slope = float(np.polyfit(N, np.log(smoothed), 1)[0])
    elapsed = time.perf_counter() - start
    ok = rs_ok and monotone and slope < 0 and elapsed < 1800
    curve = ", ".join(f"{int(r.N_out)}:{r.p_hat:.3g}" for r in recs)
    ok = criterion(7, ok, f"RS N_out={rs.N_out} K_out={rs.K_out_or_dim} block {rs.p_hat:.3f} "
                          f"(ci_hi {rs.ci_hi:.3f}) < union {union:.3f}; expander {curve}, "
                          f"log-slope {slope:.2e}/symbol [{elapsed:.1f}s]")
    assert ok


def test_criterion_08_cf_rate(criterion):
    start = time.perf_counter()
    rng = stream(108, 0)
    worst = 0.0
    for P, s2 in rng.uniform(0.01, 100, (100, 2)):
        worst = max(worst, abs(cf_rate(P, s2, [1.0], [1]) - 0.5 * math.log2(1 + P / s2)))
    two = abs(cf_rate(10.0, 1.0, [1, 1], [1, 1]) - 0.5 * math.log2(10.5))
    elapsed = time.perf_counter() - start
    ok = criterion(8, worst <= 1e-12 and two <= 1e-9 and elapsed < 1,
                   f"L=1 max error {worst:.1e}, L=2 error {two:.1e} [{elapsed:.3f}s]")
    assert ok


def test_criterion_09_cf_homomorphism(criterion):
    start = time.perf_counter()
    configs = [(2, 3, 2), (3, 3, 2), (5, 2, 2), (7, 3, 3), (3, 7, 6)]
    violations = checked = 0
    for p, n, k in configs:
        rng = stream(109, p, n)
        pair = build_nested_pair(random_code(build_ext_field(p), n, k, rng), beta=0.7)
        labels = pair.all_labels()
        i, j = np.divmod(np.arange(len(labels) ** 2), len(labels))
        for _ in range(3):
            a = rng.integers(-10, 11, 2)
            for s in range(0, len(i), 1 << 17):
                m = np.stack([labels[i[s:s + 1 << 17]], labels[j[s:s + 1 << 17]]])
                got = lattice_combination_label(pair, m, a)
                want = np.mod(np.tensordot(np.mod(a, p), m, axes=1), p)
                violations += int(np.sum(np.any(got != want, axis=1)))
                checked += m.shape[1]
    elapsed = time.perf_counter() - start
    ok = criterion(9, violations == 0 and elapsed < 60,
                   f"{violations} violations over {checked} (label pair, a) cases [{elapsed:.1f}s]")
    assert ok


def test_criterion_10_complexity(criterion):
    start = time.perf_counter()
    F2 = build_ext_field(2)
    sizes, times = [], []
    for k in range(5, 10):
        pair = build_nested_pair(random_code(F2, 10, k, stream(0, k)), beta=1.0)
        P = pair.covering_radius().radius ** 2 / 10
        inner = build_inner_codec(pair, power=P, noise_var=P / 10 ** 1.2)
        code = build_rs_concat(inner, (2**k - 1) // 2, dither_seed=1)
        msgs = stream(110, k).integers(0, 2**k, (40, code.dimension))
        x, t = code.encode(msgs)
        w = x + np.sqrt(inner.noise_var_) * stream(110, k, 1).standard_normal(x.shape)
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            code.decode_batch(w, t)
            best = min(best, time.perf_counter() - t0)
        sizes.append(code.N)
        times.append(best)
    slope = loglog_slope(sizes, times)
    elapsed = time.perf_counter() - start
    pts = ", ".join(f"N={n}:{s * 1e3:.0f}ms" for n, s in zip(sizes, times))
    ok = criterion(10, slope <= 2.4 and elapsed < 900, f"exponent {slope:.2f} ({pts}) [{elapsed:.1f}s]")
    assert ok
