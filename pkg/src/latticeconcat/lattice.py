"""Construction-A lattices, nested lattice pairs and the mod-lattice map.

A nested pair is built from a fine code ``C`` over F_p and a coarse
Construction-A lattice ``Lc = beta * Lambda_A(C_c)`` with basis matrix
``G`` (rows are basis vectors).  The fine lattice is
``(1/p) * Lambda_A(C) @ G``, which contains ``Lc`` with ``p**k`` cosets.
Hypercube shaping is the special case ``C_c = {0}``, i.e. ``Lc = beta*p*Z^n``
and fine lattice ``beta * Lambda_A(C)``.

Quantizer ties are broken towards the lexicographically smallest message,
then by rounding half-up (``floor(v + 1/2)``) in each coordinate, so the
Voronoi region of ``beta*p*Z^n`` is the half-open cube ``[-beta*p/2, beta*p/2)^n``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .exceptions import (LengthMismatch, NestingViolation, NotLatticePoint,
                         TooLarge)
from .galois import build_ext_field
from .linear_code import (ENUMERATION_LIMIT, LinearCode, enumerate_messages,
                          trivial_code)

MEMBERSHIP_TOL = 1e-6
_CHUNK_ELEMS = 1 << 22


def _round_half_up(v):
    return np.floor(v + 0.5)


def _as_points(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise LengthMismatch(f"expected vectors of length {n}, got {x.shape[-1]}")
    return x


class ConstructionALattice:
    """The scaled Construction-A lattice ``scale * Lambda_A(code)``."""

    def __init__(self, code: LinearCode, scale: float = 1.0):
        if code.field.k != 1:
            raise ValueError("Construction A needs a code over a prime field")
        if not scale > 0:
            raise ValueError("scale must be positive")
        if code.size > ENUMERATION_LIMIT:
            raise TooLarge(f"p^k = {code.size} exceeds the enumeration guard")
        self.code = code
        self.scale = float(scale)
        self.n, self.k, self.p = code.n, code.k, code.field.p
        self._words = code.codewords().astype(float)

    def __repr__(self):
        return f"ConstructionALattice(p={self.p}, n={self.n}, k={self.k}, scale={self.scale})"

    def basis(self) -> np.ndarray:
        """An n x n generator matrix whose rows span the lattice."""
        B = np.zeros((self.n, self.n))
        info = list(self.code.info_set)
        B[: self.k] = self.code.G_sys
        rest = [j for j in range(self.n) if j not in info]
        for r, j in enumerate(rest, start=self.k):
            B[r, j] = self.p
        return B * self.scale

    def closest_point(self, x) -> np.ndarray:
        x = _as_points(x, self.n)
        X = x.reshape(-1, self.n) / self.scale
        p = self.p
        if len(self._words) == 1:
            return (p * _round_half_up(X / p)).reshape(x.shape) * self.scale
        W = self._words
        out = np.empty_like(X)
        step = max(1, _CHUNK_ELEMS // (len(W) * self.n))
        for s in range(0, len(X), step):
            xs = X[s:s + step, None, :]
            cand = W + p * _round_half_up((xs - W) / p)
            err = ((xs - cand) ** 2).sum(axis=-1)
            j = err.argmin(axis=1)
            out[s:s + step] = cand[np.arange(len(j)), j]
        return out.reshape(x.shape) * self.scale

    def mod(self, x) -> np.ndarray:
        x = _as_points(x, self.n)
        return x - self.closest_point(x)

    def contains(self, y, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        y = _as_points(y, self.n)
        z = y / self.scale
        zr = np.rint(z)
        close = np.all(np.abs(z - zr) * self.scale <= tol, axis=-1)
        res = np.mod(zr, self.p).astype(np.int64)
        return close & self.code.is_codeword(res)


class CosetUnionLattice:
    """A lattice given as a union of translates ``reps[j] + coarse``.

    Quantizing takes the best of the per-coset coarse quantizations; earlier
    representatives win ties.
    """

    def __init__(self, reps, coarse: ConstructionALattice):
        self.reps = np.asarray(reps, dtype=float)
        self.coarse = coarse
        self.n = coarse.n

    def closest_point(self, x) -> np.ndarray:
        x = _as_points(x, self.n)
        X = x.reshape(-1, self.n)
        R = self.reps
        out = np.empty_like(X)
        per = len(R) * len(self.coarse._words) * self.n
        step = max(1, _CHUNK_ELEMS // per)
        for s in range(0, len(X), step):
            xs = X[s:s + step, None, :]
            cand = R + self.coarse.closest_point(xs - R)
            err = ((xs - cand) ** 2).sum(axis=-1)
            j = err.argmin(axis=1)
            out[s:s + step] = cand[np.arange(len(j)), j]
        return out.reshape(x.shape)

    def mod(self, x) -> np.ndarray:
        x = _as_points(x, self.n)
        return x - self.closest_point(x)


class CoveringRadius(NamedTuple):
    radius: float
    exact: bool


class NestedLatticePair:
    """A fine/coarse nested Construction-A pair with coset labels in F_p^k.

    Parameters
    ----------
    fine_code : LinearCode
        (n, k) code over F_p defining the fine lattice.
    beta : float
        Scale of the coarse lattice.
    coarse_code : LinearCode, optional
        Code of the coarse lattice ``beta * Lambda_A(coarse_code)``.  ``None``
        selects hypercube shaping (``beta * p * Z^n``).
    """

    def __init__(self, fine_code: LinearCode, beta: float = 1.0, coarse_code: LinearCode | None = None):
        field = fine_code.field
        if field.k != 1:
            raise ValueError("the fine code must be over a prime field")
        p, n = field.p, fine_code.n
        self.mode = "hypercube" if coarse_code is None else "general"
        if coarse_code is None:
            coarse_code = trivial_code(field, n)
        if coarse_code.field.p != p or coarse_code.n != n:
            raise ValueError("fine and coarse codes must share p and n")
        self.fine_code = fine_code
        self.coarse_code = coarse_code
        self.p, self.n, self.k = p, n, fine_code.k
        self.beta = float(beta)
        self.coarse = ConstructionALattice(coarse_code, beta)
        self.generator = self.coarse.basis()
        self._ginv = np.linalg.inv(self.generator)
        if fine_code.size > ENUMERATION_LIMIT:
            raise TooLarge(f"p^k = {fine_code.size} exceeds the enumeration guard")
        raw_reps = fine_code.codewords() @ self.generator / p
        if self.mode == "hypercube":
            self.fine = ConstructionALattice(fine_code, beta)
        else:
            self.fine = CosetUnionLattice(raw_reps, self.coarse)
        self.label_field = build_ext_field(p, self.k) if self.k else None
        self._verify(raw_reps)

    def __repr__(self):
        return (f"NestedLatticePair(p={self.p}, n={self.n}, k={self.k}, "
                f"beta={self.beta}, mode={self.mode!r})")

    def _verify(self, raw_reps):
        g = self.generator
        if not np.allclose(self.fine.closest_point(g), g, atol=MEMBERSHIP_TOL):
            raise NestingViolation("coarse basis vectors are not fine lattice points")
        if len(raw_reps) <= 10**4:
            reps = self.coarse.mod(raw_reps)
            keys = np.round(reps / MEMBERSHIP_TOL).astype(np.int64)
            if len(np.unique(keys, axis=0)) != self.p**self.k:
                raise NestingViolation("coset representatives are not distinct")

    @property
    def num_cosets(self) -> int:
        return self.p**self.k

    @property
    def rate(self) -> float:
        """Bits per real dimension, ``k * log2(p) / n``."""
        return self.k * math.log2(self.p) / self.n

    def all_labels(self) -> np.ndarray:
        return enumerate_messages(self.p, self.k)

    def label_to_coset(self, label) -> np.ndarray:
        label = np.asarray(label, dtype=np.int64)
        if label.shape[-1] != self.k:
            raise LengthMismatch(f"labels must have length {self.k}")
        if np.any((label < 0) | (label >= self.p)):
            raise ValueError(f"label entries must lie in [0, {self.p})")
        c = self.fine_code.encode(label)
        return self.coarse.mod(c @ self.generator / self.p)

    def coset_to_label(self, y) -> np.ndarray:
        y = _as_points(y, self.n)
        z = self.p * (y @ self._ginv)
        zr = np.rint(z)
        back = zr @ self.generator / self.p
        res = np.mod(zr, self.p).astype(np.int64)
        ok = np.all(np.abs(back - y) <= MEMBERSHIP_TOL, axis=-1) & self.fine_code.is_codeword(res)
        if not np.all(ok):
            raise NotLatticePoint("point is not within tolerance of the fine lattice")
        return self.fine_code.message_of(res)

    def codebook(self) -> np.ndarray:
        """The points of ``fine ∩ V(coarse)`` in label order."""
        return self.label_to_coset(self.all_labels())

    def dither_sample(self, rng, size=None) -> np.ndarray:
        """Uniform samples over the coarse Voronoi region."""
        rng = np.random.default_rng(rng)
        shape = (self.n,) if size is None else (*np.atleast_1d(size), self.n)
        u = rng.random(shape) @ self.generator
        return self.coarse.mod(u)

    def in_coarse_voronoi(self, t, tol: float = 1e-9) -> np.ndarray:
        t = _as_points(t, self.n)
        return np.all(np.abs(self.coarse.closest_point(t)) <= tol, axis=-1)

    def covering_radius(self, samples: int = 10**5, rng=0) -> CoveringRadius:
        if self.mode == "hypercube":
            return CoveringRadius(self.beta * self.p * np.sqrt(self.n) / 2, True)
        pts = self.dither_sample(rng, size=samples)
        return CoveringRadius(float(np.sqrt((pts**2).sum(axis=-1)).max()), False)


def closest_point(lat, x):
    return lat.closest_point(x)


def mod_lattice(lat, x):
    return lat.mod(x)


def build_nested_pair(fine_code: LinearCode, shaping="hypercube", beta: float = 1.0,
                      coarse_code: LinearCode | None = None) -> NestedLatticePair:
    """Build a nested pair; ``shaping`` is ``"hypercube"`` or ``"general"``."""
    if shaping == "hypercube":
        if coarse_code is not None:
            raise ValueError("hypercube shaping takes no coarse code")
        return NestedLatticePair(fine_code, beta)
    if shaping == "general":
        if coarse_code is None:
            raise ValueError("general shaping needs a coarse code")
        return NestedLatticePair(fine_code, beta, coarse_code)
    raise ValueError(f"unknown shaping {shaping!r}")


def label_to_coset(pair: NestedLatticePair, label):
    return pair.label_to_coset(label)


def coset_to_label(pair: NestedLatticePair, y):
    return pair.coset_to_label(y)


def dither_sample(pair: NestedLatticePair, rng, size=None):
    return pair.dither_sample(rng, size)


def covering_radius(pair: NestedLatticePair, samples: int = 10**5, rng=0) -> CoveringRadius:
    return pair.covering_radius(samples, rng)
