"""Concatenated nested-lattice codes with a Reed-Solomon or expander outer code.

Each outer symbol in F_{p^k} is written as its length-k digit vector, used
as a coset label, and sent through the dithered inner codec.  The receiver
decodes every inner block and hands the symbol sequence to the outer
decoder.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import stream
from .exceptions import BadParams, DecodeFailure, InfeasiblePlan, LengthMismatch
from .expander import BipartiteGraph, ExpanderCode, lemma_threshold, second_eigenvalue
from .galois import build_ext_field
from .inner import InnerCodec
from .reed_solomon import RSCode

DITHER_STREAM = 2
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class RSPlan:
    p_in_hat: float
    delta: float
    N_out: int
    K_out: int
    rate: float | None = None

    @property
    def t(self) -> int:
        return (self.N_out - self.K_out) // 2


def plan_rs(p_in_hat: float, N_out: int, delta: float, r_in: float | None = None) -> RSPlan:
    """Outer dimension ``K_out = floor(N_out (1 - 2 p_in_hat - 2 delta))``.

    ``r_in`` (bits per dimension of the inner code) is only used to report
    the planned rate ``K_out / N_out * r_in``.
    """
    if not 0 <= p_in_hat <= 1 or delta < 0:
        raise BadParams("need 0 <= p_in_hat <= 1 and delta >= 0")
    K_out = math.floor(N_out * (1 - 2 * p_in_hat - 2 * delta) + _FLOOR_GUARD)
    if K_out < 1:
        raise InfeasiblePlan(f"p_in_hat={p_in_hat:.4g}, delta={delta:.4g} leave no room for an outer message")
    if K_out >= N_out:
        warnings.warn("K_out == N_out: the outer code corrects nothing", stacklevel=2)
        K_out = N_out
    rate = None if r_in is None else K_out / N_out * r_in
    return RSPlan(float(p_in_hat), float(delta), int(N_out), int(K_out), rate)


@dataclass(frozen=True)
class ExpanderPlan:
    epsilon: float | None
    delta_graph: int
    k0: int
    d0: int
    lam: float
    N_out: int
    threshold: int
    slack_ok: bool

    @property
    def delta0(self) -> float:
        return self.d0 / self.delta_graph

    @property
    def threshold_real(self) -> float:
        return lemma_threshold(self.delta0, self.N_out, self.lam, self.delta_graph)


def plan_expander(epsilon: float | None, delta_graph: int, graph: BipartiteGraph | None = None,
                  k0: int | None = None, lam: float | None = None) -> ExpanderPlan:
    """Local code and guaranteed-correction error threshold for a given graph.

    ``k0`` defaults to ``floor(delta (1 - 4 sqrt(eps))) + 1``.  The threshold
    uses the measured second eigenvalue of ``graph``.  ``slack_ok`` reports
    whether ``2 sqrt(delta - 1) / delta <= sqrt(eps)``; it never fails the plan.
    """
    D = int(delta_graph)
    if k0 is None:
        if epsilon is None:
            raise BadParams("either epsilon or k0 is required")
        base = D * (1 - 4 * math.sqrt(epsilon))
        if base < 0:
            raise BadParams(f"delta (1 - 4 sqrt(eps)) = {base:.4g} is negative")
        k0 = math.floor(base + _FLOOR_GUARD) + 1
    k0 = int(k0)
    if not 1 <= k0 <= D:
        raise BadParams(f"k0 = {k0} outside [1, {D}]")
    if graph is not None:
        if graph.delta != D:
            raise BadParams("graph degree does not match delta_graph")
        lam = second_eigenvalue(graph) if lam is None else lam
        N_out = graph.num_edges
    elif lam is None:
        raise BadParams("need a graph or a measured lambda")
    else:
        N_out = 0
    d0 = D - k0 + 1
    slack_ok = epsilon is not None and 2 * math.sqrt(D - 1) / D <= math.sqrt(epsilon)
    thr = math.floor(lemma_threshold(d0 / D, N_out, lam, D) + _FLOOR_GUARD)
    return ExpanderPlan(epsilon, D, k0, d0, float(lam), int(N_out), thr, bool(slack_ok))


class ConcatCode:
    """Inner nested-lattice codec wrapped by an outer RS or expander code.

    Parameters
    ----------
    inner : InnerCodec
        A fitted codec.  Its pair's ``(p, k)`` must match the outer field.
    outer : RSCode or ExpanderCode
    dither_seed : int
        Dithers for trial ``i`` come from ``stream(dither_seed, 2, i)``.
    zero_dither : bool
        Debug mode: every dither is the zero vector.
    """

    def __init__(self, inner: InnerCodec, outer, dither_seed: int = 0, zero_dither: bool = False):
        F = outer.field
        pair = inner.pair
        if (F.p, F.k) != (pair.p, pair.k):
            raise BadParams(f"outer field F_{F.p}^{F.k} does not match inner labels F_{pair.p}^{pair.k}")
        if not hasattr(inner, "alpha_"):
            raise ValueError("inner codec must be fitted")
        self.inner = inner
        self.outer = outer
        self.field = F
        self.dither_seed = int(dither_seed)
        self.zero_dither = bool(zero_dither)

    def __repr__(self):
        return f"ConcatCode(inner={self.inner.pair!r}, outer={self.outer!r})"

    @property
    def n(self) -> int:
        return self.inner.pair.n

    @property
    def N_out(self) -> int:
        return self.outer.N

    @property
    def N(self) -> int:
        return self.n * self.N_out

    @property
    def dimension(self) -> int:
        return self.outer.K

    @property
    def rate(self) -> float:
        """Bits per real dimension: ``dim / N_out * k log2(p) / n``."""
        return float(self.dimension / self.N_out * self.inner.pair.rate)

    @property
    def is_expander(self) -> bool:
        return isinstance(self.outer, ExpanderCode)

    def dithers(self, trials) -> np.ndarray:
        """Dither record of shape ``(len(trials), N_out, n)``."""
        trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
        if self.zero_dither:
            return np.zeros((len(trials), self.N_out, self.n))
        pair = self.inner.pair
        return np.stack([pair.dither_sample(stream(self.dither_seed, DITHER_STREAM, int(t)), self.N_out)
                         for t in trials])

    def symbols_to_signal(self, symbols, dithers) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=np.int64)
        labels = self.field.to_vec(symbols)
        u = self.inner.encode(labels, dithers)
        return u.reshape(symbols.shape[:-1] + (self.N,))

    def signal_to_symbols(self, w, dithers) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        blocks = w.reshape(w.shape[:-1] + (self.N_out, self.n))
        labels = self.inner.decode(blocks, dithers)
        return np.asarray(self.field.from_vec(labels), dtype=np.int64)

    def encode(self, message, trials=None):
        """Encode one message (or a batch) into real vectors of length ``N``.

        ``trials`` indexes the dither streams; it defaults to ``0`` for a
        single message and ``0, 1, ...`` for a batch.  Returns ``(x, dithers)``.
        """
        message = np.asarray(message, dtype=np.int64)
        if message.ndim == 0 or message.shape[-1] != self.dimension:
            raise LengthMismatch(f"message length must be {self.dimension}")
        single = message.ndim == 1
        msgs = message.reshape(-1, self.dimension)
        if trials is None:
            trials = np.arange(len(msgs))
        trials = np.broadcast_to(np.asarray(trials, dtype=np.int64), (len(msgs),))
        t = self.dithers(trials)
        x = self.symbols_to_signal(self.outer.encode(msgs), t)
        return (x[0], t[0]) if single else (x, t)

    def outer_decode(self, symbols):
        """Decode a batch of received symbol words to ``(messages, ok)``."""
        R = np.asarray(symbols, dtype=np.int64).reshape(-1, self.N_out)
        if self.is_expander:
            words = np.stack([self.outer.decode(r) for r in R])
            ok = np.array([self.outer.is_codeword(c) for c in words], dtype=bool)
        else:
            words, ok = self.outer.decode_words(R)
        return self.outer.message_of(words), ok

    def decode_batch(self, w, dithers):
        w = np.asarray(w, dtype=float).reshape(-1, self.N)
        t = np.asarray(dithers, dtype=float).reshape(-1, self.N_out, self.n)
        if len(w) != len(t):
            raise LengthMismatch("received words and dither records differ in count")
        return self.outer_decode(self.signal_to_symbols(w, t))

    def decode(self, w, dithers) -> np.ndarray:
        """Decode one received vector; raises DecodeFailure on outer failure."""
        w = np.asarray(w, dtype=float)
        if w.shape != (self.N,):
            raise LengthMismatch(f"expected a vector of length {self.N}")
        msgs, ok = self.decode_batch(w, dithers)
        if not ok[0]:
            raise DecodeFailure("outer decoder failed")
        return msgs[0]

    transform = encode
    predict = decode


def build_rs_concat(inner: InnerCodec, K_out: int, N_out: int | None = None, dither_seed: int = 0,
                    zero_dither: bool = False) -> ConcatCode:
    """RS-outer concatenation with ``N_out = p^k - 1`` by default."""
    pair = inner.pair
    F = build_ext_field(pair.p, pair.k)
    N_out = F.order - 1 if N_out is None else N_out
    return ConcatCode(inner, RSCode(F, N_out, K_out), dither_seed, zero_dither)


def build_expander_concat(inner: InnerCodec, graph: BipartiteGraph, k0: int, dither_seed: int = 0,
                          zero_dither: bool = False) -> ConcatCode:
    pair = inner.pair
    F = build_ext_field(pair.p, pair.k)
    outer = ExpanderCode(graph, RSCode(F, graph.delta, k0))
    return ConcatCode(inner, outer, dither_seed, zero_dither)


def concat_encode(code: ConcatCode, message, trial: int | None = None):
    return code.encode(message, trial)


def concat_decode(code: ConcatCode, w, dithers):
    return code.decode(w, dithers)
