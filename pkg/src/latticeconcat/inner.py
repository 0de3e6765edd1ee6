"""Dithered mod-lattice point-to-point codec (the inner code).

Encoder: ``u = [x - t] mod Lc`` where ``x`` is the coset representative of
the label and ``t`` a dither uniform over ``V(Lc)``.
Decoder: ``w~ = [alpha*w + t] mod Lc``, then the label of
``[Q_fine(w~)] mod Lc``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._stats import wilson_interval
from ._validation import check_labels, check_points, check_positive
from .channel import awgn, stream
from .exceptions import DitherOutOfRegion, PowerViolation
from .lattice import NestedLatticePair

CHUNK_TRIALS = 4096
INNER_PE_STREAM = 1
_POWER_RTOL = 1e-12


class InnerCodec(BaseEstimator):
    """Nested-lattice codec for one block of ``n`` real dimensions.

    Parameters
    ----------
    pair : NestedLatticePair
    power : float, optional
        Per-dimension power budget ``P``.  Defaults to the pair's own maximum
        power ``r_cov(Lc)**2 / n``.
    noise_var : float
        Channel noise variance per dimension.
    alpha : float, optional
        Receiver scaling; defaults to the MMSE value ``P / (P + noise_var)``.

    Attributes
    ----------
    power_, alpha_, rate_, covering_radius_
    """

    def __init__(self, pair: NestedLatticePair | None = None, power=None, noise_var=0.0, alpha=None):
        self.pair = pair
        self.power = power
        self.noise_var = noise_var
        self.alpha = alpha

    def fit(self, X=None, y=None):
        if not isinstance(self.pair, NestedLatticePair):
            raise TypeError("pair must be a NestedLatticePair")
        sigma2 = check_positive("noise_var", self.noise_var, allow_zero=True)
        r_cov = self.pair.covering_radius()
        max_power = r_cov.radius**2 / self.pair.n
        P = max_power if self.power is None else check_positive("power", self.power)
        if max_power > P * (1 + _POWER_RTOL):
            raise PowerViolation(f"r_cov^2/n = {max_power:.6g} exceeds P = {P:.6g}")
        alpha = P / (P + sigma2) if self.alpha is None else float(self.alpha)
        if not 0 < alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
        self.power_ = P
        self.noise_var_ = sigma2
        self.alpha_ = alpha
        self.rate_ = self.pair.rate
        self.covering_radius_ = r_cov
        return self

    @property
    def n(self) -> int:
        return self.pair.n

    def encode(self, labels, dithers) -> np.ndarray:
        """Transmit vectors for ``labels`` (..., k) under ``dithers`` (..., n)."""
        check_is_fitted(self, "alpha_")
        pair = self.pair
        labels = check_labels(labels, pair.p, pair.k)
        t = check_points(dithers, pair.n)
        if not np.all(pair.in_coarse_voronoi(t)):
            raise DitherOutOfRegion("dither lies outside the coarse Voronoi region")
        x = pair.label_to_coset(labels)
        return pair.coarse.mod(x - t)

    def decode(self, received, dithers) -> np.ndarray:
        check_is_fitted(self, "alpha_")
        pair = self.pair
        w = check_points(received, pair.n)
        t = check_points(dithers, pair.n)
        w_tilde = pair.coarse.mod(self.alpha_ * w + t)
        y = pair.coarse.mod(pair.fine.closest_point(w_tilde))
        return pair.coset_to_label(y)

    transform = encode
    predict = decode


def build_inner_codec(pair, power=None, noise_var=0.0, alpha=None) -> InnerCodec:
    return InnerCodec(pair, power, noise_var, alpha).fit()


def encode_inner(codec: InnerCodec, label, dither):
    return codec.encode(label, dither)


def decode_inner(codec: InnerCodec, w, dither):
    return codec.decode(w, dither)


@dataclass(frozen=True)
class ErrorEstimate:
    errors: int
    trials: int
    p_hat: float
    ci_lo: float
    ci_hi: float

    @property
    def ci(self) -> tuple[float, float]:
        return (self.ci_lo, self.ci_hi)

    @classmethod
    def from_counts(cls, errors: int, trials: int) -> "ErrorEstimate":
        lo, hi = wilson_interval(errors, trials)
        return cls(int(errors), int(trials), errors / trials, lo, hi)


def _inner_chunk(codec: InnerCodec, seed: int, chunk: int, size: int) -> int:
    rng = stream(seed, INNER_PE_STREAM, chunk)
    pair = codec.pair
    labels = rng.integers(0, pair.p, size=(size, pair.k))
    t = pair.dither_sample(rng, size)
    u = codec.encode(labels, t)
    w = awgn(u, codec.noise_var_, rng)
    decoded = codec.decode(w, t)
    return int(np.any(decoded != labels, axis=1).sum())


def estimate_inner_pe(codec: InnerCodec, trials: int, seed: int = 0, threads: int = 1) -> ErrorEstimate:
    """Monte Carlo symbol error rate of the inner codec.

    Trials are split into fixed chunks, each with its own stream, so the
    estimate does not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check_is_fitted(codec, "alpha_")
    sizes = [min(CHUNK_TRIALS, trials - s) for s in range(0, trials, CHUNK_TRIALS)]
    jobs = [(codec, seed, c, size) for c, size in enumerate(sizes)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errors = sum(pool.map(lambda a: _inner_chunk(*a), jobs))
    else:
        errors = sum(_inner_chunk(*a) for a in jobs)
    return ErrorEstimate.from_counts(errors, trials)
