"""Built-in oracle checks, run by ``latticeconcat verify``.

Each check is small enough to finish in a few seconds.  They cover the
algebraic facts the rest of the package relies on, using brute force or
closed forms as the reference.
"""

from __future__ import annotations

import itertools
import math
import time
from typing import Callable

import numpy as np

from .channel import stream
from .compute_forward import CFSystem, cf_rate, combine_symbols, lattice_combination_label
from .concat import build_rs_concat
from .exceptions import DecodeFailure
from .galois import build_ext_field
from .inner import build_inner_codec
from .lattice import build_nested_pair
from .linear_code import LinearCode, random_code
from .reed_solomon import RSCode


def brute_force_closest(pair, x, window: int = 1) -> np.ndarray:
    """Closest fine-lattice point by search over nearby coarse translates.

    The fine lattice is the union of the coset representatives shifted by
    coarse lattice points; every coarse shift within ``window`` steps of the
    rounded coarse coordinate of ``x`` is tried.  Ties go to the first
    candidate in (representative, shift) lexicographic order, matching the
    fast quantizer's lowest-codeword preference.
    """
    x = np.asarray(x, dtype=float)
    G = pair.generator
    reps = pair.fine_code.codewords() @ G / pair.p
    shifts = np.array(list(itertools.product(range(-window, window + 1), repeat=pair.n)), dtype=float)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        best, best_d = None, math.inf
        for r in reps:
            base = np.floor((xi - r) @ pair._ginv + 0.5)
            cand = r + (base + shifts) @ G
            d = ((cand - xi) ** 2).sum(axis=1)
            j = int(np.argmin(d))
            if d[j] < best_d - 1e-12:
                best, best_d = cand[j], d[j]
        out[i] = best
    return out


def check_quantizer(points: int = 200) -> bool:
    rng = stream(11, 0)
    for (p, n, k, beta) in [(2, 2, 1, 1.0), (3, 3, 2, 0.5), (5, 2, 1, 1.3), (3, 4, 1, 2.0)]:
        pair = build_nested_pair(random_code(build_ext_field(p), n, k, rng), beta=beta)
        x = rng.normal(scale=beta * p, size=(points, n))
        d_fast = ((pair.fine.closest_point(x) - x) ** 2).sum(axis=1)
        d_ref = ((brute_force_closest(pair, x) - x) ** 2).sum(axis=1)
        if not np.allclose(d_fast, d_ref, atol=1e-9):
            return False
    return True


def check_coset_isomorphism() -> bool:
    rng = stream(12, 0)
    for (p, n, k) in [(2, 3, 2), (3, 3, 2), (5, 2, 2)]:
        pair = build_nested_pair(random_code(build_ext_field(p), n, k, rng), beta=0.8)
        labels = pair.all_labels()
        pts = pair.label_to_coset(labels)
        if not np.array_equal(pair.coset_to_label(pts), labels):
            return False
        i, j = rng.integers(0, len(labels), (2, 200))
        s = pair.coset_to_label(pair.coarse.mod(pts[i] + pts[j]))
        if not np.array_equal(s, (labels[i] + labels[j]) % p):
            return False
    return True


def check_rs_radius() -> bool:
    F = build_ext_field(7)
    C = RSCode(F, 6, 2)
    rng = stream(13, 0)
    for m in rng.integers(0, 7, (8, 2)):
        c = C.encode(m)
        for pos in itertools.combinations(range(6), 2):
            for vals in itertools.product(range(1, 7), repeat=2):
                r = c.copy()
                r[list(pos)] = F.add(r[list(pos)], np.array(vals))
                try:
                    msg, _ = C.decode(r)
                except DecodeFailure:
                    return False
                if not np.array_equal(msg, m):
                    return False
    return True


def check_noiseless_concat() -> bool:
    F = build_ext_field(3)
    pair = build_nested_pair(random_code(F, 3, 2, stream(14, 0)), beta=1.0)
    inner = build_inner_codec(pair, noise_var=0.0, alpha=1.0)
    code = build_rs_concat(inner, 4, dither_seed=1)
    msgs = stream(14, 1).integers(0, 9, (200, 4))
    x, t = code.encode(msgs)
    out, ok = code.decode_batch(x, t)
    return bool(ok.all() and np.array_equal(out, msgs))


def check_cf_homomorphism() -> bool:
    rng = stream(15, 0)
    pair = build_nested_pair(random_code(build_ext_field(3), 3, 2, rng), beta=0.6)
    labels = pair.all_labels()
    for _ in range(100):
        a = rng.integers(-10, 11, 3)
        m = labels[rng.integers(0, len(labels), 3)]
        if not np.array_equal(lattice_combination_label(pair, m, a), (np.mod(a, 3) @ m) % 3):
            return False
    return True


def check_cf_noiseless() -> bool:
    F = build_ext_field(5)
    pair = build_nested_pair(LinearCode(F, [[1, 2]]), beta=1.0)
    inner = build_inner_codec(pair, noise_var=0.0, alpha=1.0)
    code = build_rs_concat(inner, 2, dither_seed=2)
    system = CFSystem(code, [1, 3], [1, 3], 0.0, alpha=1.0)
    msgs = stream(16, 0).integers(0, 5, (2, 200, 2))
    u, t = system.encode_all(msgs)
    out, ok = system.decode_batch(np.tensordot(system.h, u, axes=1), t)
    return bool(ok.all() and np.array_equal(out, combine_symbols(F, msgs, system.a)))


def check_cf_rate() -> bool:
    rng = stream(17, 0)
    for P, s2 in rng.uniform(0.01, 100, (100, 2)):
        if abs(cf_rate(P, s2, [1.0], [1]) - 0.5 * math.log2(1 + P / s2)) > 1e-12:
            return False
    return abs(cf_rate(10.0, 1.0, [1, 1], [1, 1]) - 0.5 * math.log2(10.5)) <= 1e-9


CHECKS: dict[str, Callable[[], bool]] = {
    "quantizer vs brute force": check_quantizer,
    "coset labels are a group isomorphism": check_coset_isomorphism,
    "RS (6,2) over F_7 corrects every weight-2 error": check_rs_radius,
    "noiseless RS concatenation": check_noiseless_concat,
    "compute-and-forward homomorphism": check_cf_homomorphism,
    "noiseless compute-and-forward": check_cf_noiseless,
    "computation rate closed forms": check_cf_rate,
}


def run_all(out=print) -> bool:
    ok_all = True
    for name, fn in CHECKS.items():
        start = time.perf_counter()
        try:
            ok = bool(fn())
            note = ""
        except Exception as exc:  # a crash is a failed check
            ok, note = False, f" ({type(exc).__name__}: {exc})"
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}  [{time.perf_counter() - start:.2f}s]{note}")
    return ok_all
