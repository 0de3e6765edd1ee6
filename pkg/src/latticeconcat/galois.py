"""Arithmetic over prime fields F_p and extension fields F_{p^k}.

Field elements are plain integers in ``[0, p**k)``.  The base-p digits of an
element, least significant first, are the coefficients of its polynomial
representative modulo the field's irreducible modulus (coefficient of
``X^0`` first).  This is also the serialized symbol format.

Every arithmetic method accepts Python ints or integer numpy arrays and
broadcasts; scalar inputs give Python ints back.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .exceptions import DivisionByZero, LengthMismatch, NotPrime

_TABLE_LIMIT = 1 << 16
_ADD_TABLE_LIMIT = 1 << 10
_MAX_ORDER = 1 << 32
_EXHAUSTIVE_FACTOR_LIMIT = 10_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# Polynomials over F_p as lists of ints, constant term first.

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a, b, p):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _trim(a)
    return q, a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_mulmod(a, b, f, p):
    return _poly_divmod(_poly_mul(a, b, p), f, p)[1]


def _poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _x_pow_mod(e, f, p):
    """X**e mod f by square-and-multiply."""
    result = [1]
    base = _poly_divmod([0, 1], f, p)[1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _sub_x(a, p):
    a = list(a) + [0] * max(0, 2 - len(a))
    a[1] = (a[1] - 1) % p
    return _trim(a)


def is_irreducible_rabin(f, p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial ``f`` over F_p."""
    f = _trim(f)
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if _trim(_sub_x(_x_pow_mod(p**k, f, p), p)):
        return False
    for r in _prime_factors(k):
        h = _sub_x(_x_pow_mod(p ** (k // r), f, p), p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


def is_irreducible_exhaustive(f, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(f)//2."""
    f = _trim(f)
    k = len(f) - 1
    if k < 1:
        return False
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_divmod(f, list(low) + [1], p)[1]:
                return False
    return True


def is_irreducible(f, p: int) -> bool:
    k = len(_trim(f)) - 1
    if k >= 2 and p ** (k // 2) <= _EXHAUSTIVE_FACTOR_LIMIT:
        return is_irreducible_exhaustive(f, p)
    return is_irreducible_rabin(f, p)


def lowest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k whose lower coefficients, read as a
    base-p integer (constant term least significant), are smallest."""
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class ExtField:
    """The finite field F_{p^k} built as F_p[X] / (modulus).

    Parameters
    ----------
    p : int
        Prime characteristic.
    k : int
        Extension degree, ``p**k <= 2**32``.
    modulus : sequence of int, optional
        Monic irreducible of degree k, constant term first.  Defaults to
        :func:`lowest_irreducible`.
    """

    def __init__(self, p: int, k: int = 1, modulus=None):
        p, k = int(p), int(k)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        if p**k > _MAX_ORDER:
            raise ValueError(f"field order {p}^{k} exceeds 2^32")
        if modulus is None:
            modulus = lowest_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if not is_irreducible(list(modulus), p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.k = k
        self.order = p**k
        self.modulus = modulus
        self._radix = p ** np.arange(k, dtype=np.int64)
        self._mod_low = np.array(modulus[:k], dtype=np.int64)
        self._exp = self._log = None
        self._add_table = None
        if self.order <= _TABLE_LIMIT:
            self._build_log_tables()
        if k > 1 and p != 2 and self.order <= _ADD_TABLE_LIMIT:
            e = np.arange(self.order)
            self._add_table = self._add_digits(e[:, None], e[None, :])

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k}, modulus={self.modulus})"

    def __eq__(self, other):
        return (isinstance(other, ExtField) and self.p == other.p
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    # -- representation --------------------------------------------------

    @property
    def has_tables(self) -> bool:
        return self._exp is not None

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def to_vec(self, a) -> np.ndarray:
        """Coefficient vectors, shape ``a.shape + (k,)``."""
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._radix) % self.p

    def from_vec(self, v):
        v = np.asarray(v, dtype=np.int64)
        return _out((v % self.p) @ self._radix)

    def is_element(self, a) -> bool:
        a = np.asarray(a)
        return bool(np.all((a >= 0) & (a < self.order)))

    # -- arithmetic ------------------------------------------------------

    def _add_digits(self, a, b):
        return ((self.to_vec(a) + self.to_vec(b)) % self.p) @ self._radix

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return _out((a + b) % self.p)
        if self.p == 2:
            return _out(a ^ b)
        if self._add_table is not None:
            return _out(self._add_table[a, b])
        return _out(self._add_digits(a, b))

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return _out((-a) % self.p)
        if self.p == 2:
            return _out(a)
        return _out(((-self.to_vec(a)) % self.p) @ self._radix)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scalar_mul(self, c, a):
        """``c``-fold sum of ``a`` for an ordinary integer ``c``."""
        a = np.asarray(a, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64) % self.p
        if self.k == 1:
            return _out((c * a) % self.p)
        return _out(((self.to_vec(a) * c[..., None]) % self.p) @ self._radix)

    def _mul_digits(self, a, b):
        da, db = self.to_vec(a), self.to_vec(b)
        da, db = np.broadcast_arrays(da, db)
        k, p = self.k, self.p
        prod = np.zeros(da.shape[:-1] + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[..., d]
            prod[..., d - k:d] = (prod[..., d - k:d] - c[..., None] * self._mod_low) % p
        return prod[..., :k] @ self._radix

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return _out((a * b) % self.p)
        if self._exp is not None:
            r = self._exp[self._log[a] + self._log[b]]
            return _out(np.where((a == 0) | (b == 0), 0, r))
        return _out(self._mul_digits(a, b))

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        if self._exp is not None:
            return _out(self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)])
        return self.pow(a, self.order - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        e = int(e)
        if e < 0:
            a, e = np.asarray(self.inv(a)), -e
        if e == 0:
            return _out(np.ones_like(a))
        if self._exp is not None:
            r = self._exp[(self._log[a] * (e % (self.order - 1))) % (self.order - 1)]
            return _out(np.where(a == 0, 0, r))
        result = np.ones_like(a)
        base = a
        while e:
            if e & 1:
                result = self._mul_digits(result, base)
            base = self._mul_digits(base, base)
            e >>= 1
        return _out(result)

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return _out(a.sum(axis=axis) % self.p)
        if self.p == 2:
            if axis is None:
                return _out(np.bitwise_xor.reduce(a, axis=None))
            return _out(np.bitwise_xor.reduce(a, axis=axis))
        d = self.to_vec(a)
        if axis is None:
            s = d.reshape(-1, self.k).sum(axis=0)
        else:
            ax = axis if axis >= 0 else axis + a.ndim
            s = d.sum(axis=ax)
        return _out((s % self.p) @ self._radix)

    def matmul(self, A, B):
        """Matrix product over the field, ``A`` is (I, J), ``B`` is (J, K)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[-1] != B.shape[0]:
            raise LengthMismatch(f"cannot multiply {A.shape} by {B.shape}")
        if self.k == 1:
            return (A @ B) % self.p
        squeeze = A.ndim == 1
        A2 = np.atleast_2d(A)
        I, J = A2.shape
        K = B.shape[1] if B.ndim == 2 else 1
        B2 = B.reshape(J, K)
        out = np.zeros((I, K), dtype=np.int64)
        step = max(1, (1 << 22) // max(1, J * K))
        for s in range(0, I, step):
            prod = self.mul(A2[s:s + step, :, None], B2[None, :, :])
            out[s:s + step] = self.sum(prod, axis=1)
        if B.ndim == 1:
            out = out[:, 0]
        return out[0] if squeeze else out

    def poly_eval(self, coeffs, x):
        """Evaluate the polynomial with ``coeffs`` (constant first) at ``x``."""
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(list(coeffs)):
            acc = np.asarray(self.add(self.mul(acc, x), int(c)))
        return _out(acc)

    # -- structure -------------------------------------------------------

    @functools.cached_property
    def primitive_element(self) -> int:
        """The smallest element (by integer code) that generates F*."""
        q1 = self.order - 1
        if q1 == 1:
            return 1
        factors = _prime_factors(q1)
        for g in range(2, self.order):
            if all(self._slow_pow(g, q1 // r) != 1 for r in factors):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _slow_pow(self, a, e):
        if self.k == 1:
            return pow(int(a), e, self.p)
        result, base = np.int64(1), np.int64(a)
        while e:
            if e & 1:
                result = self._mul_digits(result, base)
            base = self._mul_digits(base, base)
            e >>= 1
        return int(result)

    def _build_log_tables(self):
        q = self.order
        g = self.primitive_element
        if self.k == 1:
            mul = lambda a, b: (a * b) % self.p  # noqa: E731
        else:
            mul = self._mul_digits
        block = max(1, int(np.sqrt(q)))
        head = np.ones(block, dtype=np.int64)
        for j in range(1, block):
            head[j] = mul(head[j - 1], g)
        g_block = mul(head[-1], g)
        exp = np.empty(q - 1, dtype=np.int64)
        start = np.int64(1)
        for s in range(0, q - 1, block):
            seg = mul(start, head)
            exp[s:s + block] = seg[: q - 1 - s]
            start = mul(start, g_block)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self._exp = np.concatenate([exp, exp])
        self._log = log


class PrimeField(ExtField):
    """F_p, the degree-one special case."""

    def __init__(self, p: int):
        super().__init__(p, 1, modulus=(0, 1))

    def __repr__(self):
        return f"GF({self.p})"


def _out(x):
    if np.ndim(x) == 0:
        return int(x)
    return x


@functools.lru_cache(maxsize=None)
def build_ext_field(p: int, k: int = 1) -> ExtField:
    """Field with the deterministic lowest irreducible modulus.

    ``k == 1`` gives a :class:`PrimeField`.  Results are cached, so equal
    ``(p, k)`` always yield the same object.
    """
    if not is_prime(int(p)):
        raise NotPrime(f"{p} is not prime")
    if int(k) == 1:
        return PrimeField(p)
    return ExtField(p, k)


def field_arith(field: ExtField, op: str, a, b=None):
    ops = {
        "add": lambda: field.add(a, b),
        "sub": lambda: field.sub(a, b),
        "mul": lambda: field.mul(a, b),
        "div": lambda: field.div(a, b),
        "inv": lambda: field.inv(a),
        "neg": lambda: field.neg(a),
        "pow": lambda: field.pow(a, b),
    }
    if op not in ops:
        raise ValueError(f"unknown field operation {op!r}")
    return ops[op]()


def vec_to_symbol(field: ExtField, v):
    """Identify a length-k vector over F_p with an element of F_{p^k}."""
    v = np.asarray(v, dtype=np.int64)
    if v.shape[-1] != field.k:
        raise LengthMismatch(f"expected length {field.k}, got {v.shape[-1]}")
    if np.any((v < 0) | (v >= field.p)):
        raise ValueError(f"vector entries must lie in [0, {field.p})")
    return field.from_vec(v)


def symbol_to_vec(field: ExtField, a) -> np.ndarray:
    if not field.is_element(a):
        raise ValueError(f"symbols must lie in [0, {field.order})")
    return field.to_vec(a)


def symbol_to_digits(field: ExtField, a) -> str:
    """Base-p digit string, least significant digit first.

    Digits are dot-separated when ``p > 10``.
    """
    sep = "" if field.p <= 10 else "."
    return sep.join(str(int(d)) for d in field.to_vec(int(a)))


def digits_to_symbol(field: ExtField, s: str) -> int:
    digits = list(s) if field.p <= 10 else s.split(".")
    return vec_to_symbol(field, [int(d) for d in digits])
