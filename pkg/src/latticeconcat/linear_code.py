"""(n, k) linear block codes over F_p or F_{p^k}."""

from __future__ import annotations

import numpy as np

from .exceptions import LengthMismatch, RankDeficient, TooLarge
from .galois import ExtField

ENUMERATION_LIMIT = 10**6


def row_reduce(field: ExtField, M):
    """Reduced row echelon form over ``field``.

    Returns ``(R, pivots)`` where ``pivots`` lists the pivot column of each
    nonzero row of ``R``; zero rows are dropped.
    """
    R = np.array(M, dtype=np.int64)
    if R.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = field.mul(R[r], field.inv(int(R[r, c])))
        others = np.nonzero(R[:, c])[0]
        others = others[others != r]
        if others.size:
            R[others] = field.sub(R[others], field.mul(R[others, c][:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(field: ExtField, M) -> int:
    return len(row_reduce(field, M)[1])


def null_space(field: ExtField, H):
    """Basis (as rows) of ``{x : H x^T = 0}``."""
    H = np.asarray(H, dtype=np.int64)
    n = H.shape[1]
    R, pivots = row_reduce(field, H)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        if pivots:
            basis[i, pivots] = field.neg(R[:, f])
    return basis


def enumerate_messages(q: int, k: int) -> np.ndarray:
    """All length-k vectors over [0, q) in lexicographic order."""
    idx = np.arange(q**k, dtype=np.int64)
    powers = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers) % q


class LinearCode:
    """A linear code given by a full-rank k x n generator matrix.

    The systematic generator ``G_sys`` is the reduced row echelon form of
    ``G``; its pivot columns form the information set, so
    ``encode(m)[info_set] == m``.
    """

    def __init__(self, field: ExtField, G):
        G = np.asarray(G, dtype=np.int64)
        if G.ndim != 2:
            raise ValueError("generator matrix must be 2-D")
        if not field.is_element(G):
            raise ValueError(f"generator entries must lie in [0, {field.order})")
        self.field = field
        self.k, self.n = G.shape
        self.G = G
        G_sys, pivots = row_reduce(field, G)
        if len(pivots) < self.k:
            raise RankDeficient(f"generator has rank {len(pivots)} < {self.k}")
        if rank(field, np.vstack([G_sys, G])) != self.k:
            raise RankDeficient("systematic form spans a different space")  # pragma: no cover
        self.G_sys = G_sys
        self.info_set = np.array(pivots, dtype=np.int64)

    def __repr__(self):
        return f"LinearCode({self.field!r}, n={self.n}, k={self.k})"

    @property
    def size(self) -> int:
        return self.field.order**self.k

    def encode(self, m):
        m = np.asarray(m, dtype=np.int64)
        if m.shape[-1] != self.k:
            raise LengthMismatch(f"message length {m.shape[-1]} != k={self.k}")
        if self.k == 0:
            return np.zeros(m.shape[:-1] + (self.n,), dtype=np.int64)
        flat = m.reshape(-1, self.k)
        return self.field.matmul(flat, self.G_sys).reshape(m.shape[:-1] + (self.n,))

    def message_of(self, c):
        """Inverse of :meth:`encode` on codewords."""
        c = np.asarray(c, dtype=np.int64)
        return c[..., self.info_set]

    def is_codeword(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=np.int64)
        return np.all(self.encode(self.message_of(c)) == c, axis=-1)

    def parity_check(self):
        """An (n - k) x n parity-check matrix."""
        return null_space(self.field, self.G_sys)

    def codewords(self) -> np.ndarray:
        """Every codeword, in lexicographic order of the message."""
        if self.size > ENUMERATION_LIMIT:
            raise TooLarge(f"{self.size} codewords exceed the enumeration guard")
        return self.encode(enumerate_messages(self.field.order, self.k))


def code_from_generator(field: ExtField, G) -> LinearCode:
    return LinearCode(field, G)


def encode(code: LinearCode, m):
    return code.encode(m)


def random_code(field: ExtField, n: int, k: int, rng) -> LinearCode:
    """Uniform i.i.d. generator entries, redrawn until full rank."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    rng = np.random.default_rng(rng)
    while True:
        G = rng.integers(0, field.order, size=(k, n))
        if rank(field, G) == k:
            return LinearCode(field, G)


def trivial_code(field: ExtField, n: int) -> LinearCode:
    """The zero code {0} of length n."""
    return LinearCode(field, np.zeros((0, n), dtype=np.int64))


def min_distance_bruteforce(code: LinearCode) -> int:
    if code.k == 0:
        raise ValueError("the zero code has no nonzero codewords")
    words = code.codewords()[1:]
    return int(np.count_nonzero(words, axis=1).min())
