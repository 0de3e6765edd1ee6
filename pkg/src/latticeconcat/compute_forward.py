"""Compute-and-forward over the Gaussian MAC with concatenated lattice codes.

All L sources share one inner codec and one outer code.  The receiver
scales its observation by ``alpha``, adds back ``sum a_l t_l`` and
decodes the integer combination ``sum (a_l mod p) M_l`` of the messages.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import gaussian_mac, stream
from .concat import ConcatCode
from .exceptions import DecodeFailure, DegenerateCoefficients, LengthMismatch
from .inner import CHUNK_TRIALS, ErrorEstimate

SIGMA2_MIN = 1e-12
CF_DITHER_STREAM = 3
RELAY_PE_STREAM = 6


def cf_alpha(P: float, sigma2: float, h, a) -> float:
    """``P sum(h a) / (sigma2 + P sum(h^2))``."""
    h = np.asarray(h, dtype=float)
    a = np.asarray(a, dtype=float)
    return float(P * (h @ a) / (sigma2 + P * (h @ h)))


def cf_rate(P: float, sigma2: float, h, a) -> float:
    """Achievable computation rate in bits per dimension.

    Evaluates ``1/2 log2(P / (alpha^2 sigma2 + P ||alpha h - a||^2))`` with
    the alpha of :func:`cf_alpha`, capped at ``1/2 log2(1 + P / 1e-12)``.
    Raises DegenerateCoefficients when the rate is not positive.
    """
    h = np.atleast_1d(np.asarray(h, dtype=float))
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if h.shape != a.shape:
        raise LengthMismatch("h and a must have the same length")
    if not np.any(a):
        raise DegenerateCoefficients("all-zero coefficient vector")
    s2 = max(float(sigma2), SIGMA2_MIN)
    alpha = cf_alpha(P, s2, h, a)
    denom = alpha**2 * s2 + P * float(np.sum((alpha * h - a) ** 2))
    cap = 0.5 * math.log2(1 + P / SIGMA2_MIN)
    if denom <= 0:
        return cap
    arg = P / denom
    if arg <= 1:
        raise DegenerateCoefficients(f"log argument {arg:.6g} <= 1")
    return min(0.5 * math.log2(arg), cap)


class CFSystem:
    """L transmitters sharing a concatenated code, one relay.

    Parameters
    ----------
    code : ConcatCode
        Shared inner codec and outer code.  Source ``l`` draws its dithers
        for trial ``i`` from ``stream(code.dither_seed, 3, l, i)``.
    h : array_like
        Real channel gains.
    a : array_like of int
        Desired integer combination.
    noise_var : float
    alpha : float, optional
        Receiver scaling; defaults to :func:`cf_alpha`.
    """

    def __init__(self, code: ConcatCode, h, a, noise_var: float = 0.0, alpha: float | None = None):
        self.code = code
        self.h = np.atleast_1d(np.asarray(h, dtype=float))
        self.a = np.atleast_1d(np.asarray(a))
        if self.a.dtype.kind not in "iu":
            if not np.all(self.a == np.round(self.a)):
                raise ValueError("a must be integer-valued")
            self.a = self.a.astype(np.int64)
        if self.h.shape != self.a.shape:
            raise LengthMismatch("h and a must have the same length")
        self.noise_var = float(noise_var)
        P = code.inner.power_
        self.alpha = cf_alpha(P, self.noise_var, self.h, self.a) if alpha is None else float(alpha)

    @property
    def L(self) -> int:
        return len(self.h)

    @property
    def p(self) -> int:
        return self.code.inner.pair.p

    def rate(self) -> float:
        return cf_rate(self.code.inner.power_, self.noise_var, self.h, self.a)

    def dithers(self, source: int, trials) -> np.ndarray:
        c = self.code
        trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
        if c.zero_dither:
            return np.zeros((len(trials), c.N_out, c.n))
        pair = c.inner.pair
        return np.stack([pair.dither_sample(stream(c.dither_seed, CF_DITHER_STREAM, source, int(t)), c.N_out)
                         for t in trials])

    def encode_all(self, messages, trials=None):
        """``messages`` has shape ``(L, K)`` or ``(L, T, K)``.

        Returns ``(u, dithers)`` with shapes ``(L, [T,] N)`` and
        ``(L, [T,] N_out, n)``.
        """
        c = self.code
        messages = np.asarray(messages, dtype=np.int64)
        if messages.shape[0] != self.L or messages.shape[-1] != c.dimension:
            raise LengthMismatch(f"expected {self.L} messages of length {c.dimension}")
        single = messages.ndim == 2
        msgs = messages.reshape(self.L, -1, c.dimension)
        T = msgs.shape[1]
        trials = np.arange(T) if trials is None else np.broadcast_to(np.asarray(trials, dtype=np.int64), (T,))
        u, t = [], []
        for l in range(self.L):
            tl = self.dithers(l, trials)
            u.append(c.symbols_to_signal(c.outer.encode(msgs[l]), tl))
            t.append(tl)
        u, t = np.stack(u), np.stack(t)
        return (u[:, 0], t[:, 0]) if single else (u, t)

    def relay_symbols(self, w, dithers) -> np.ndarray:
        """Per-block estimates of the combined outer symbols."""
        c = self.code
        pair = c.inner.pair
        w = np.asarray(w, dtype=float).reshape(-1, c.N_out, c.n)
        t = np.asarray(dithers, dtype=float).reshape(self.L, -1, c.N_out, c.n)
        shift = np.tensordot(self.a.astype(float), t, axes=1)
        w_tilde = pair.coarse.mod(self.alpha * w + shift)
        y = pair.coarse.mod(pair.fine.closest_point(w_tilde))
        labels = pair.coset_to_label(y)
        return np.asarray(c.field.from_vec(labels), dtype=np.int64)

    def decode_batch(self, w, dithers):
        """Combined messages for a batch, plus a success mask."""
        return self.code.outer_decode(self.relay_symbols(w, dithers))

    def decode(self, w, dithers) -> np.ndarray:
        msgs, ok = self.decode_batch(w, dithers)
        if not ok[0]:
            raise DecodeFailure("outer decoder failed on the combined word")
        return msgs[0]

    def combine(self, messages) -> np.ndarray:
        """Reference combination ``sum (a_l mod p) M_l`` over F_{p^k}."""
        return combine_symbols(self.code.field, messages, self.a)


def combine_symbols(field, symbols, a) -> np.ndarray:
    """``sum_l (a_l mod p) * symbols[l]`` over ``field``."""
    symbols = np.asarray(symbols, dtype=np.int64)
    acc = np.zeros(symbols.shape[1:], dtype=np.int64)
    for al, s in zip(np.asarray(a), symbols):
        acc = np.asarray(field.add(acc, field.scalar_mul(int(al) % field.p, s)))
    return acc


def lattice_combination_label(pair, labels, a) -> np.ndarray:
    """Label of ``[sum a_l x(m_l)] mod coarse``; equals ``sum (a_l mod p) m_l``."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(a):
        raise LengthMismatch("one label per coefficient")
    x = sum(float(al) * pair.label_to_coset(m) for al, m in zip(a, labels))
    return pair.coset_to_label(pair.coarse.mod(x))


def estimate_relay_pe(inner, h, a, noise_var: float, alpha: float | None, trials: int, seed: int = 0):
    """Symbol error rate of the relay's per-block combination estimate.

    Uses the same chunked streams as the point-to-point estimator, under its
    own stream label.
    """
    pair = inner.pair
    h = np.atleast_1d(np.asarray(h, dtype=float))
    a = np.atleast_1d(np.asarray(a, dtype=np.int64))
    alpha = cf_alpha(inner.power_, noise_var, h, a) if alpha is None else float(alpha)
    errors = 0
    for chunk, start in enumerate(range(0, trials, CHUNK_TRIALS)):
        size = min(CHUNK_TRIALS, trials - start)
        rng = stream(seed, RELAY_PE_STREAM, chunk)
        labels = rng.integers(0, pair.p, size=(len(h), size, pair.k))
        t = np.stack([pair.dither_sample(rng, size) for _ in h])
        u = np.stack([inner.encode(labels[l], t[l]) for l in range(len(h))])
        w = gaussian_mac(list(u), h, noise_var, rng)
        w_tilde = pair.coarse.mod(alpha * w + np.tensordot(a.astype(float), t, axes=1))
        est = pair.coset_to_label(pair.coarse.mod(pair.fine.closest_point(w_tilde)))
        want = np.mod(np.tensordot(np.mod(a, pair.p), labels, axes=1), pair.p)
        errors += int(np.any(est != want, axis=1).sum())
    return ErrorEstimate.from_counts(errors, trials)


def build_cf_system(code: ConcatCode, h, a, noise_var: float = 0.0, alpha=None) -> CFSystem:
    return CFSystem(code, h, a, noise_var, alpha)


def cf_encode_all(system: CFSystem, messages, trials=None):
    return system.encode_all(messages, trials)


def cf_decode(system: CFSystem, w, dithers):
    return system.decode(w, dithers)
