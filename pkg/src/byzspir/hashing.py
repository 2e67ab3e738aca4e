"""Polynomial hashes at secret points, and the error bounds they give.

A hash of a vector ``x`` at point ``p`` is ``sum_i x_i p**i`` with ``i``
starting at 1.  There is no constant term, which is what keeps a forger
who does not know ``p`` from succeeding more often than ``deg / q``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import (DuplicateExponentPoint, MissingAppendedRandomness, ShapeMismatch,
                     ZeroExponentPoint)
from .field import Field, invert
from .scheme import Dataset, Model, SchemeParams, build_generators


class Flavor(str, enum.Enum):
    ANSWER = "answer"
    MESSAGE = "message"


@dataclass
class HashBundle:
    p: tuple
    values: np.ndarray
    flavor: Flavor
    servers: tuple = ()   # which servers sent each row (answer flavor)

    @property
    def alpha(self) -> int:
        return len(self.p)


def build_p_matrix(field: Field, p, rows: int) -> np.ndarray:
    """``rows x len(p)`` matrix with entry (i, j) = p[j]**(i+1)."""
    pts = [int(x) % field.modulus for x in p]
    if any(x == 0 for x in pts):
        raise ZeroExponentPoint("hash points must be nonzero")
    if len(set(pts)) != len(pts):
        raise DuplicateExponentPoint(f"hash points are not distinct: {list(p)}")
    cols = [field.powers(x, 1, rows + 1) for x in pts]
    return field.array(cols).reshape(len(pts), rows).T.copy()


def sample_points(field: Field, alpha: int, rng: np.random.Generator) -> tuple:
    """``alpha`` distinct uniform nonzero points, by rejection."""
    out = []
    while len(out) < alpha:
        x = int(rng.integers(1, field.modulus))
        if x not in out:
            out.append(x)
    return tuple(out)


def hash_server_set(params: SchemeParams) -> tuple:
    """Servers that send answer hashes: 1..N-B."""
    return tuple(range(1, params.N - params.B + 1))


def answer_hashes(params: SchemeParams, answers: np.ndarray, p, servers=None) -> HashBundle:
    """Hashes of the clean answers of ``servers`` (default 1..N-B), one row per server.

    Since the answers are ``G @ X`` this equals ``G_servers @ X @ P``.
    """
    servers = tuple(servers) if servers is not None else hash_server_set(params)
    if len(servers) != params.N - params.B:
        raise ShapeMismatch(f"need {params.N - params.B} hashing servers, got {len(servers)}")
    f = params.field
    P = build_p_matrix(f, p, params.width)
    rows = np.asarray(answers)[[n - 1 for n in servers]]
    return HashBundle(tuple(p), f.matmul(rows, P), Flavor.ANSWER, servers)


def message_hashes(params: SchemeParams, dataset: Dataset, p) -> HashBundle:
    """One row of ``alpha`` hashes per stored message, padding included."""
    if params.beta == 0:
        raise MissingAppendedRandomness("message hashes need appended randomness (beta > 0)")
    f = params.field
    P = build_p_matrix(f, p, params.message_length)
    return HashBundle(tuple(p), f.matmul(dataset.messages, P), Flavor.MESSAGE)


@lru_cache(maxsize=256)
def _unmix(params: SchemeParams, servers: tuple) -> np.ndarray:
    _, _, G = build_generators(params)
    return invert(params.field, G[[n - 1 for n in servers]])


def x_row_hashes(params: SchemeParams, bundle: HashBundle) -> HashBundle:
    """Turn per-server answer hashes into one row of hashes per row of X."""
    if bundle.flavor is not Flavor.ANSWER:
        raise ValueError("only answer hashes can be unmixed")
    vals = params.field.matmul(_unmix(params, tuple(bundle.servers)), bundle.values)
    return HashBundle(bundle.p, vals, Flavor.ANSWER)


def hash_rows(field: Field, rows: np.ndarray, p) -> np.ndarray:
    rows = np.atleast_2d(rows)
    return field.matmul(rows, build_p_matrix(field, p, rows.shape[1]))


def verify(field: Field, candidate_rows: np.ndarray, bundle: HashBundle) -> np.ndarray:
    """Boolean per row: does the row hash to the stored values exactly."""
    rows = np.atleast_2d(candidate_rows)
    vals = np.atleast_2d(bundle.values)
    if rows.shape[0] != vals.shape[0]:
        raise ShapeMismatch(f"{rows.shape[0]} rows against {vals.shape[0]} hash rows")
    return np.all(hash_rows(field, rows, bundle.p) == vals, axis=1)


def forgery_bound(n: int, q: int) -> Fraction:
    """Forgery probability bound for a degree-``n`` hash at an unknown point."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    return Fraction(n, q)


@dataclass(frozen=True)
class ErrorBound:
    actual: Fraction   # with the field actually used
    nominal: Fraction  # with q replaced by l^2

    def __float__(self):
        return float(self.actual)


def scheme_error_bound(params: SchemeParams) -> ErrorBound:
    """Union bound on the decoding error probability."""
    N, B, q, l, alpha = params.N, params.B, params.q, params.l, params.alpha
    c = comb(N, B)
    if params.model is Model.SECRET_CHANNEL:
        return ErrorBound(c * Fraction(l, q) ** alpha, c * Fraction(l, l * l) ** alpha)
    deg = params.message_length
    return ErrorBound(
        c * Fraction(deg, q) ** alpha + Fraction(N, q**N),
        c * Fraction(deg, l * l) ** alpha + Fraction(N, l ** (2 * N)),
    )
