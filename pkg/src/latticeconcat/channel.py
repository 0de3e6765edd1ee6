"""AWGN and Gaussian multiple-access channels with addressable noise.

Randomness is drawn from counter-based Philox streams keyed by
``(master seed, *indices)``, so any trial's noise can be regenerated
without replaying earlier trials.  Gaussians come from the Box-Muller
transform applied to consecutive pairs of uniforms; output position ``i``
depends only on uniforms ``2*(i//2)`` and ``2*(i//2)+1`` of its stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import LengthMismatch

GAUSSIAN_METHOD = "box-muller over philox uniforms"


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator addressed by ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng()
    return stream(int(rng))


def standard_normal(rng: np.random.Generator, shape) -> np.ndarray:
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    size = int(np.prod(shape, dtype=np.int64))
    pairs = (size + 1) // 2
    u = rng.random(2 * pairs).reshape(pairs, 2)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * np.pi * u[:, 1]
    z = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1).reshape(-1)
    return z[:size].reshape(shape)


def sigma2_from_snr(power: float, snr_db) -> float:
    """Noise variance for ``snr_db = 10 log10(P / sigma2)``; ``inf`` gives 0."""
    if snr_db is None or np.isinf(float(snr_db)):
        return 0.0
    return float(power) / 10 ** (float(snr_db) / 10)


@dataclass(frozen=True)
class ChannelSpec:
    sigma2: float
    h: tuple = field(default=(1.0,))

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ValueError("sigma2 must be non-negative")
        h = tuple(float(v) for v in np.atleast_1d(self.h))
        if not np.all(np.isfinite(h)):
            raise ValueError("channel coefficients must be finite")
        object.__setattr__(self, "h", h)

    @property
    def L(self) -> int:
        return len(self.h)


def awgn(x, sigma2: float, rng) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if sigma2 == 0:
        return x.copy()
    return x + np.sqrt(sigma2) * standard_normal(as_generator(rng), x.shape)


def gaussian_mac(u_list, h, sigma2: float, rng) -> np.ndarray:
    """``sum_l h[l] * u_list[l] + z``."""
    u = [np.asarray(v, dtype=float) for v in u_list]
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if len(u) != len(h):
        raise LengthMismatch(f"{len(u)} inputs but {len(h)} channel coefficients")
    if any(v.shape != u[0].shape for v in u):
        raise LengthMismatch("all transmitted vectors must have the same shape")
    combined = sum(hl * ul for hl, ul in zip(h, u))
    return awgn(combined, sigma2, rng)
