"""Prime-field arithmetic and the matrix routines the protocol needs.

Elements are canonical residues in ``[0, q)``.  Matrices are plain numpy
arrays: ``int64`` when ``q < 2**31`` (so a single product cannot overflow),
``object`` arrays of Python ints otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy

from .errors import ConfigError, DuplicatePoint, ShapeMismatch, Singular

_INT64_LIMIT = 2**63 - 1


def smallest_prime_at_least(n: int) -> int:
    """Smallest prime ``>= n``."""
    if n <= 2:
        return 2
    return n if sympy.isprime(n) else int(sympy.nextprime(n))


@dataclass(frozen=True)
class Field:
    """The prime field GF(q)."""

    modulus: int

    def __post_init__(self):
        q = self.modulus
        if not isinstance(q, (int, np.integer)) or q < 2:
            raise ConfigError({"q": f"modulus must be an integer >= 2, got {q!r}"})
        if q >= 2**64:
            raise ConfigError({"q": "modulus must fit in a 64-bit word"})
        if not sympy.isprime(int(q)):
            raise ConfigError({"q": f"modulus {q} is not prime"})
        object.__setattr__(self, "modulus", int(q))

    @property
    def q(self) -> int:
        return self.modulus

    @cached_property
    def dtype(self):
        return np.int64 if self.modulus < 2**31 else object

    @property
    def bits(self) -> int:
        """ceil(log2 q): bits needed to send one symbol."""
        return (self.modulus - 1).bit_length()

    # scalars

    def inv(self, x: int) -> int:
        x = int(x) % self.modulus
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(x, -1, self.modulus)

    def pow(self, x: int, e: int) -> int:
        return pow(int(x), int(e), self.modulus)

    # arrays

    def array(self, values) -> np.ndarray:
        """Reduce ``values`` into the field and return an array of the field dtype."""
        if self.dtype is object:
            arr = np.array(values, dtype=object)
            return np.vectorize(lambda v: int(v) % self.modulus, otypes=[object])(arr) \
                if arr.size else arr
        arr = np.asarray(values)
        if arr.dtype == object:
            arr = np.vectorize(lambda v: int(v) % self.modulus, otypes=[np.int64])(arr) \
                if arr.size else arr.astype(np.int64)
            return arr.astype(np.int64)
        return np.mod(arr.astype(np.int64), self.modulus)

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(0)
            return out
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = 1
        return out

    def random(self, rng: np.random.Generator, shape, nonzero: bool = False) -> np.ndarray:
        """Uniform elements (uniform over the nonzero elements if ``nonzero``)."""
        low = 1 if nonzero else 0
        if self.dtype is object:
            vals = rng.integers(low, self.modulus, size=shape, dtype=np.uint64)
            return np.asarray(vals, dtype=object) if np.ndim(vals) else int(vals)
        return rng.integers(low, self.modulus, size=shape, dtype=np.int64)

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape[-1] != b.shape[0]:
            raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
        inner = max(a.shape[-1], 1)
        if self.dtype is not object and inner * (self.modulus - 1) ** 2 <= _INT64_LIMIT:
            return (a.astype(np.int64) @ b.astype(np.int64)) % self.modulus
        out = np.dot(a.astype(object), b.astype(object)) % self.modulus
        return out.astype(self.dtype) if self.dtype is not object else out

    def powers(self, x: int, start: int, stop: int) -> list[int]:
        """``[x**start, ..., x**(stop-1)]`` as Python ints."""
        q = self.modulus
        cur = pow(int(x), start, q)
        x = int(x) % q
        out = []
        for _ in range(start, stop):
            out.append(cur)
            cur = cur * x % q
        return out


def vandermonde(field: Field, points, cols: int) -> np.ndarray:
    """``len(points) x cols`` matrix with entry (i, j) = points[i]**j."""
    pts = [int(p) % field.modulus for p in points]
    if len(set(pts)) != len(pts):
        raise DuplicatePoint(f"points are not distinct: {list(points)}")
    if cols < 1:
        raise ShapeMismatch("a Vandermonde matrix needs at least one column")
    return field.array([field.powers(p, 0, cols) for p in pts]).reshape(len(pts), cols)


def _eliminate(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gauss-Jordan on ``[a | b]``; returns ``a^-1 b``."""
    q = field.modulus
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ShapeMismatch(f"matrix must be square, got {a.shape}")
    if b.shape[0] != n:
        raise ShapeMismatch(f"right-hand side has {b.shape[0]} rows, expected {n}")
    dtype = field.dtype if field.dtype is object else np.int64
    aug = np.concatenate([a.astype(dtype), b.astype(dtype)], axis=1) % q
    if dtype is not object and q > 2**31:
        aug = aug.astype(object)
    for col in range(n):
        nz = np.nonzero(aug[col:, col] != 0)[0]
        if nz.size == 0:
            raise Singular(f"no pivot in column {col}")
        piv = col + int(nz[0])
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] * pow(int(aug[col, col]), -1, q) % q
        factors = aug[:, col].copy()
        factors[col] = 0
        rows = np.nonzero(factors)[0]
        if rows.size:
            aug[rows] = (aug[rows] - np.outer(factors[rows], aug[col]) % q) % q
    out = aug[:, n:]
    return out.astype(field.dtype) if field.dtype is not object else out


def invert(field: Field, m: np.ndarray) -> np.ndarray:
    """Inverse of a square matrix over ``field``; raises Singular if none exists."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"matrix must be square, got {m.shape}")
    return _eliminate(field, m, field.identity(m.shape[0]))


def solve(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """The exact solution ``x`` of ``a @ x = b``."""
    b = np.asarray(b)
    if b.ndim == 1:
        return _eliminate(field, a, b.reshape(-1, 1))[:, 0]
    return _eliminate(field, a, b)


def is_invertible(field: Field, m: np.ndarray) -> bool:
    try:
        invert(field, m)
    except Singular:
        return False
    return True


def poly_mul(field: Field, f, g) -> np.ndarray:
    """Product of two coefficient vectors (lowest degree first)."""
    f = np.asarray(f)
    g = np.asarray(g)
    n = min(len(f), len(g))
    if field.dtype is not object and n * (field.modulus - 1) ** 2 <= _INT64_LIMIT:
        return np.convolve(f.astype(np.int64), g.astype(np.int64)) % field.modulus
    out = np.convolve(f.astype(object), g.astype(object)) % field.modulus
    return field.array(out)


def poly_from_roots(field: Field, roots) -> np.ndarray:
    """Monic polynomial prod (x - r), lowest degree first."""
    out = field.array([1])
    for r in roots:
        out = poly_mul(field, out, field.array([-int(r), 1]))
    return out


def poly_eval(field: Field, coeffs, x: int) -> int:
    """Evaluate a coefficient vector (lowest degree first) at ``x``."""
    acc = 0
    q = field.modulus
    for c in reversed([int(c) for c in coeffs]):
        acc = (acc * x + c) % q
    return acc
