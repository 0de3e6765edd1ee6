"""Reed-Solomon codes over F_{p^k} in evaluation form.

A message ``m`` of length K is the polynomial ``f(X) = sum m[i] X^i``; its
codeword is ``(f(x_0), ..., f(x_{N-1}))`` with ``x_i = a**i`` for the
field's smallest primitive element ``a``.  Decoding is bounded-distance
via syndromes of the generalized-RS dual, Berlekamp-Massey, Chien search
and Forney's formula.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from ._validation import check_symbols
from .exceptions import BadParams, DecodeFailure
from .galois import ExtField

SYNDROME_TABLE_LIMIT = 2**16


class RSCode:
    """(N, K, N-K+1) Reed-Solomon code.

    Parameters
    ----------
    field : ExtField
    N : int
        Blocklength, at most ``field.order - 1``.
    K : int
        Dimension, ``1 <= K <= N``.
    """

    def __init__(self, field: ExtField, N: int, K: int):
        N, K = int(N), int(K)
        if not 1 <= K <= N <= field.order - 1:
            raise BadParams(f"need 1 <= K <= N <= {field.order - 1}, got N={N}, K={K}")
        self.field = field
        self.N, self.K = N, K
        self.alpha = field.primitive_element
        self.eval_points = _powers(field, self.alpha, N)
        F = field
        # Column multipliers of the dual code: v_i = 1 / prod_{j != i} (x_i - x_j).
        x = self.eval_points
        diff = F.sub(x[:, None], x[None, :])
        np.fill_diagonal(diff, 1)
        self.col_mult = np.asarray(F.inv(_prod(F, diff, axis=1)))
        self._x_inv = np.asarray(F.inv(x))

    def __repr__(self):
        return f"RSCode({self.field!r}, N={self.N}, K={self.K})"

    @property
    def d(self) -> int:
        return self.N - self.K + 1

    @property
    def t(self) -> int:
        """Guaranteed error-correcting radius."""
        return (self.N - self.K) // 2

    @property
    def dimension(self) -> int:
        return self.K

    @functools.cached_property
    def generator_matrix(self) -> np.ndarray:
        """K x N matrix with ``G[l, i] = x_i ** l``."""
        F = self.field
        G = np.ones((self.K, self.N), dtype=np.int64)
        for l in range(1, self.K):
            G[l] = F.mul(G[l - 1], self.eval_points)
        return G

    @functools.cached_property
    def parity_check_matrix(self) -> np.ndarray:
        """(N-K) x N matrix with ``H[j, i] = v_i * x_i ** j``."""
        F = self.field
        H = np.empty((self.N - self.K, self.N), dtype=np.int64)
        row = self.col_mult
        for j in range(self.N - self.K):
            H[j] = row
            row = np.asarray(F.mul(row, self.eval_points))
        return H

    @functools.cached_property
    def _interp(self) -> np.ndarray:
        """Inverse of the Vandermonde block on the first K positions."""
        F = self.field
        pts = self.eval_points[: self.K]
        K = self.K
        # master polynomial M(X) = prod (X - x_j), constant term first
        M = np.array([1], dtype=np.int64)
        for xj in pts:
            shifted = np.concatenate([[0], M])
            scaled = np.concatenate([np.asarray(F.mul(M, F.neg(int(xj)))), [0]])
            M = np.asarray(F.add(shifted, scaled))
        # synthetic division of M by (X - x_i), all i at once
        Q = np.zeros((K, K), dtype=np.int64)
        Q[:, K - 1] = M[K]
        for j in range(K - 1, 0, -1):
            Q[:, j - 1] = F.add(M[j], F.mul(pts, Q[:, j]))
        denom = _eval_rows(F, Q, pts)
        return np.asarray(F.mul(Q, F.inv(denom)[:, None]))

    def encode(self, m) -> np.ndarray:
        m = check_symbols(m, self.field.order, self.K)
        flat = m.reshape(-1, self.K)
        return self.field.matmul(flat, self.generator_matrix).reshape(m.shape[:-1] + (self.N,))

    def syndromes(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.int64)
        flat = r.reshape(-1, self.N)
        if self.N == self.K:
            return np.zeros(r.shape[:-1] + (0,), dtype=np.int64)
        s = self.field.matmul(flat, self.parity_check_matrix.T)
        return s.reshape(r.shape[:-1] + (self.N - self.K,))

    def is_codeword(self, r) -> np.ndarray:
        return ~np.any(self.syndromes(r) != 0, axis=-1)

    def message_of(self, c) -> np.ndarray:
        """Message of a codeword (interpolation on the first K positions)."""
        c = np.asarray(c, dtype=np.int64)
        flat = c.reshape(-1, self.N)[:, : self.K]
        return self.field.matmul(flat, self._interp).reshape(c.shape[:-1] + (self.K,))

    def decode_word(self, r):
        """Nearest codeword within radius ``t``.

        Returns ``(codeword, corrected_count)``; raises DecodeFailure when no
        codeword lies within the radius.
        """
        F = self.field
        r = check_symbols(r, F.order, self.N)
        if r.ndim != 1:
            raise ValueError("decode_word takes a single word")
        S = self.syndromes(r)
        if not np.any(S):
            return r.copy(), 0
        lam = berlekamp_massey(F, S)
        L = len(lam) - 1
        if L > self.t:
            raise DecodeFailure(f"locator degree {L} exceeds radius {self.t}")
        vals = np.asarray(F.poly_eval(lam, self._x_inv))
        pos = np.nonzero(vals == 0)[0]
        if len(pos) != L:
            raise DecodeFailure("error locator does not split over the evaluation points")
        # Forney: Y_l = -X_l * Omega(X_l^-1) / Lambda'(X_l^-1), e = Y / v
        omega = _poly_mul_trunc(F, S, lam, len(S))
        dlam = [F.scalar_mul(i, int(c)) for i, c in enumerate(lam)][1:]
        xinv = self._x_inv[pos]
        num = F.mul(F.neg(self.eval_points[pos]), F.poly_eval(omega, xinv))
        den = F.poly_eval(dlam, xinv)
        if np.any(np.asarray(den) == 0):
            raise DecodeFailure("repeated root in the error locator")
        err = F.div(F.div(num, den), self.col_mult[pos])
        c = r.copy()
        c[pos] = F.sub(c[pos], err)
        if np.any(self.syndromes(c)):
            raise DecodeFailure("correction did not produce a codeword")
        return c, L

    @functools.cached_property
    def syndrome_table(self) -> np.ndarray | None:
        """Error pattern for each syndrome, or ``None`` if the table is too big.

        Row ``s`` (syndrome read as a base-q integer, first entry least
        significant) holds the unique error of weight ``<= t`` with that
        syndrome; rows with no such error are filled with ``-1``.
        """
        q, r = self.field.order, self.N - self.K
        if q**r > SYNDROME_TABLE_LIMIT:
            return None
        table = np.full((q**r, self.N), -1, dtype=np.int64)
        table[0] = 0
        for w in range(1, self.t + 1):
            for pos in itertools.combinations(range(self.N), w):
                vals = np.array(list(itertools.product(range(1, q), repeat=w)), dtype=np.int64)
                e = np.zeros((len(vals), self.N), dtype=np.int64)
                e[:, list(pos)] = vals
                table[self._syndrome_index(self.syndromes(e))] = e
        return table

    def _syndrome_index(self, S) -> np.ndarray:
        q = self.field.order
        return (np.asarray(S, dtype=np.int64) * q ** np.arange(S.shape[-1], dtype=np.int64)).sum(axis=-1)

    def decode_words(self, R):
        """Batched :meth:`decode_word`.

        Returns ``(codewords, ok)``; rows with ``ok == False`` are returned
        unchanged.
        """
        F = self.field
        R = check_symbols(R, F.order, self.N).reshape(-1, self.N)
        out = R.copy()
        ok = np.ones(len(R), dtype=bool)
        S = self.syndromes(R)
        bad = np.nonzero(np.any(S != 0, axis=1))[0]
        if bad.size == 0:
            return out, ok
        table = self.syndrome_table
        if table is not None:
            e = table[self._syndrome_index(S[bad])]
            found = e[:, 0] >= 0
            rows = bad[found]
            out[rows] = F.sub(R[rows], e[found])
            ok[bad[~found]] = False
            return out, ok
        for i in bad:
            try:
                out[i], _ = self.decode_word(R[i])
            except DecodeFailure:
                ok[i] = False
        return out, ok

    def decode(self, r):
        """Bounded-distance decode to ``(message, corrected_count)``."""
        c, count = self.decode_word(r)
        return self.message_of(c), count


def _powers(F, a, N):
    out = np.empty(N, dtype=np.int64)
    out[0] = 1
    for i in range(1, N):
        out[i] = F.mul(int(out[i - 1]), a)
    return out


def _prod(F, A, axis):
    A = np.moveaxis(np.asarray(A), axis, -1)
    acc = np.ones(A.shape[:-1], dtype=np.int64)
    for j in range(A.shape[-1]):
        acc = np.asarray(F.mul(acc, A[..., j]))
    return acc


def _eval_rows(F, Q, x):
    """Evaluate row i of ``Q`` (polynomial coefficients) at ``x[i]``."""
    acc = np.zeros(len(x), dtype=np.int64)
    for j in range(Q.shape[1] - 1, -1, -1):
        acc = np.asarray(F.add(F.mul(acc, x), Q[:, j]))
    return acc


def _poly_mul_trunc(F, a, b, n):
    out = np.zeros(n, dtype=np.int64)
    for i, ai in enumerate(a[:n]):
        ai = int(ai)
        if ai:
            m = min(len(b), n - i)
            out[i:i + m] = F.add(out[i:i + m], F.mul(ai, np.asarray(b[:m])))
    return out


def berlekamp_massey(F: ExtField, S) -> list[int]:
    """Shortest LFSR ``Lambda`` (constant term 1) generating ``S``."""
    S = np.asarray(S, dtype=np.int64)
    n_s = len(S)
    C = np.zeros(n_s + 1, dtype=np.int64)
    B = np.zeros(n_s + 1, dtype=np.int64)
    C[0] = B[0] = 1
    L, m, b = 0, 1, 1
    for n in range(n_s):
        d = int(S[n])
        if L:
            d = F.add(d, int(F.sum(F.mul(C[1:L + 1], S[n - L:n][::-1]))))
        if d == 0:
            m += 1
            continue
        coef = F.div(d, b)
        T = C.copy()
        C[m:] = F.sub(C[m:], F.mul(coef, B[:n_s + 1 - m]))
        if 2 * L <= n:
            L = n + 1 - L
            B = T
            b = d
            m = 1
        else:
            m += 1
    return [int(c) for c in C[:L + 1]]


def rs_build(field: ExtField, N: int, K: int) -> RSCode:
    return RSCode(field, N, K)


def rs_encode(code: RSCode, m):
    return code.encode(m)


def rs_decode(code: RSCode, r):
    return code.decode(r)
