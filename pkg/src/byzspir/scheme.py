"""Scheme parameters, query/answer generation and rate accounting.

Layout conventions used throughout the package:

* ``m = N - T - B`` symbols of the desired message are carried per instance,
  and a batch has ``width = l + beta`` instances.
* A message is a flat vector of ``m * width`` symbols; symbol ``j`` of
  instance ``i`` (both 0-based) sits at position ``i * m + j``.  The last
  ``m * beta`` positions hold the appended randomness of the untouched
  server model.
* Message indices ``k`` are 1-based.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import ConfigError, ShapeMismatch
from .field import Field, smallest_prime_at_least, vandermonde


class Model(str, enum.Enum):
    SECRET_CHANNEL = "secret"
    UNTOUCHED_SERVER = "untouched"


@dataclass(frozen=True)
class SchemeParams:
    K: int
    N: int
    T: int
    B: int
    l: int
    field: Field
    alpha: int
    model: Model = Model.SECRET_CHANNEL
    E: int = 0
    beta: int = 0
    lambdas: tuple = None
    allow_zero_lambda: bool = False
    hash_check: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.lambdas is None:
            object.__setattr__(self, "lambdas", tuple(range(1, self.N + 1)))
        else:
            object.__setattr__(self, "lambdas", tuple(int(x) for x in self.lambdas))
        errors = {}
        K, N, T, B, l, q = self.K, self.N, self.T, self.B, self.l, self.field.modulus
        if K < 1:
            errors["K"] = "need at least one message"
        if T < 0:
            errors["T"] = "must be >= 0"
        if B < 0:
            errors["B"] = "must be >= 0"
        if N <= T + B:
            errors["N"] = f"N={N} must exceed T+B={T + B} (capacity is 0 otherwise)"
        if l < 1:
            errors["l"] = "need at least one instance"
        if self.alpha < 1:
            errors["alpha"] = "need at least one hash"
        elif self.alpha > q - 1:
            errors["alpha"] = f"cannot pick {self.alpha} distinct nonzero points in GF({q})"
        if q < l * l:
            errors["q"] = f"q={q} is smaller than l^2={l * l}"
        lam = [x % q for x in self.lambdas]
        if len(lam) != N:
            errors["lambdas"] = f"need exactly N={N} evaluation points"
        elif len(set(lam)) != N:
            errors["lambdas"] = "evaluation points must be distinct"
        elif 0 in lam and not self.allow_zero_lambda:
            errors["lambdas"] = "evaluation points must be nonzero"
        if q <= N and not (self.allow_zero_lambda and q == N):
            errors.setdefault("q", f"q={q} too small for {N} distinct evaluation points")
        if self.model is Model.SECRET_CHANNEL:
            if self.beta != 0:
                errors["beta"] = "secret channel model uses no extra instances"
        else:
            if self.E < 0 or self.E + B >= N:
                errors["E"] = f"untouched model requires E+B < N (E={self.E}, B={B}, N={N})"
            if self.beta < 1:
                errors["beta"] = "untouched model needs beta >= 1 padding instances"
            elif self.alpha > (N - T - B) * self.beta:
                errors["alpha"] = "alpha must not exceed (N-T-B)*beta padding symbols"
        if self.hash_check not in ("all", "message"):
            errors["hash_check"] = "must be 'all' or 'message'"
        if errors:
            raise ConfigError(errors)

    @classmethod
    def create(cls, K, N, T, B, l, alpha, model="secret", E=0, beta=0, q=None, **kw):
        """Build params, picking the smallest prime ``q >= max(l^2, N + 1)`` if not given."""
        if q is None:
            q = smallest_prime_at_least(max(l * l, N + 1))
        return cls(K=K, N=N, T=T, B=B, l=l, field=Field(q), alpha=alpha,
                   model=model, E=E, beta=beta, **kw)

    @property
    def q(self) -> int:
        return self.field.modulus

    @property
    def m(self) -> int:
        return self.N - self.T - self.B

    @property
    def width(self) -> int:
        return self.l + self.beta

    @property
    def message_length(self) -> int:
        """Stored symbols per message, padding included."""
        return self.m * self.width


@dataclass
class Dataset:
    messages: np.ndarray  # K x (m * width)

    @classmethod
    def random(cls, params: SchemeParams, rng: np.random.Generator) -> "Dataset":
        return cls(params.field.random(rng, (params.K, params.message_length)))

    def check(self, params: SchemeParams):
        if self.messages.shape != (params.K, params.message_length):
            raise ShapeMismatch(
                f"dataset shape {self.messages.shape}, expected {(params.K, params.message_length)}")

    def payload(self, params: SchemeParams, k: int) -> np.ndarray:
        """Message ``k`` without the appended randomness."""
        return self.messages[k - 1, : params.m * params.l]

    def block_matrix(self, params: SchemeParams) -> np.ndarray:
        """The (K*m) x width matrix whose column i stacks every message's i-th block."""
        K, m, w = params.K, params.m, params.width
        return self.messages.reshape(K, w, m).transpose(0, 2, 1).reshape(K * m, w)


@dataclass
class QueryArtifacts:
    U: np.ndarray        # T x K*m
    queries: np.ndarray  # N x K*m, row n-1 goes to server n
    k: int


@dataclass
class AnswerSet:
    values: np.ndarray  # N x width
    corrupted: tuple = dc_field(default_factory=tuple)

    @property
    def corrupted_flags(self) -> list[bool]:
        return [n + 1 in self.corrupted for n in range(self.values.shape[0])]


@lru_cache(maxsize=256)
def build_generators(params: SchemeParams):
    """Return ``(G_U, G_e, G)``; ``G = [G_U G_e]`` is the N x (N-B) Vandermonde matrix."""
    f = params.field
    G = vandermonde(f, params.lambdas, params.N - params.B)
    G.setflags(write=False)
    G_U = G[:, : params.T]
    scale = f.array([f.pow(x, params.T) for x in params.lambdas]).reshape(-1, 1)
    G_e = f.mul(scale, vandermonde(f, params.lambdas, params.m))
    G_e.setflags(write=False)
    return G_U, G_e, G


def selection_matrix(params: SchemeParams, k: int) -> np.ndarray:
    """The m x K*m stack of unit rows picking message ``k``."""
    if not 1 <= k <= params.K:
        raise ConfigError({"k": f"message index {k} outside [1, {params.K}]"})
    e = params.field.zeros((params.m, params.K * params.m))
    for j in range(params.m):
        e[j, (k - 1) * params.m + j] = 1
    return e


def queries_from_secret(params: SchemeParams, k: int, U: np.ndarray) -> QueryArtifacts:
    f = params.field
    U = f.array(U).reshape(params.T, params.K * params.m)
    G_U, G_e, _ = build_generators(params)
    Q = f.add(f.matmul(G_U, U), f.matmul(G_e, selection_matrix(params, k)))
    return QueryArtifacts(U=U, queries=Q, k=k)


def generate_queries(params: SchemeParams, k: int, rng: np.random.Generator) -> QueryArtifacts:
    """Sample the user's secret ``U`` and build every server's query.

    The same queries serve all ``width`` instances.
    """
    U = params.field.random(rng, (params.T, params.K * params.m))
    return queries_from_secret(params, k, U)


def build_x_matrix(params: SchemeParams, dataset: Dataset, k: int, U: np.ndarray,
                   common_s: np.ndarray) -> np.ndarray:
    """The (N-B) x width payload matrix: masked projections over message ``k``'s blocks."""
    f = params.field
    dataset.check(params)
    if np.shape(U) != (params.T, params.K * params.m):
        raise ShapeMismatch(f"U has shape {np.shape(U)}")
    if np.shape(common_s) != (params.T, params.width):
        raise ShapeMismatch(f"common randomness has shape {np.shape(common_s)}")
    top = f.add(f.matmul(U, dataset.block_matrix(params)), common_s)
    bottom = dataset.messages[k - 1].reshape(params.width, params.m).T
    return np.concatenate([top, bottom], axis=0).astype(f.dtype)


def generate_answers(params: SchemeParams, X: np.ndarray) -> AnswerSet:
    _, _, G = build_generators(params)
    if X.shape != (params.N - params.B, params.width):
        raise ShapeMismatch(f"X has shape {X.shape}")
    return AnswerSet(params.field.matmul(G, X))


def server_answer(params: SchemeParams, n: int, query: np.ndarray, dataset: Dataset,
                  common_s: np.ndarray) -> np.ndarray:
    """What server ``n`` computes from its own query, the data and the shared randomness."""
    f = params.field
    lam = params.lambdas[n - 1]
    weights = f.array(f.powers(lam, 0, params.T)).reshape(1, -1)
    inner = f.matmul(query.reshape(1, -1), dataset.block_matrix(params))
    mask = f.matmul(weights, common_s) if params.T else f.zeros(inner.shape)
    return f.add(inner, mask)[0]


def capacity(N: int, T: int, B: int, rho) -> Fraction:
    if N <= T + B:
        return Fraction(0)
    if Fraction(rho) < Fraction(T, N - T - B):
        return Fraction(0)
    return 1 - Fraction(T + B, N)


def capacity_omniscient_zero_error(N: int, T: int, B: int) -> Fraction:
    """Zero-error capacity against an omniscient adversary (comparator only)."""
    return max(Fraction(0), 1 - Fraction(T + 2 * B, N))


def rho_threshold(N: int, T: int, B: int) -> Fraction:
    return Fraction(T, N - T - B)


@dataclass(frozen=True)
class Accounting:
    rate: Fraction
    rho: Fraction
    rho_threshold: Fraction
    download_symbols: int        # answer symbols, N * width
    secret_symbols: int = 0      # secret channel payload
    phase1_symbols: int = 0      # broadcast cost, untouched model
    rho_phase1: Fraction = Fraction(0)
    phase1_symbols_nominal: float = 0.0   # same cost with log q read as 2 log2 l


def accounting(params: SchemeParams) -> Accounting:
    """Exact rate and shared-randomness figures for ``params``."""
    N, T, B, K, l, m = params.N, params.T, params.B, params.K, params.l, params.m
    alpha = params.alpha
    download = N * params.width
    if params.model is Model.SECRET_CHANNEL:
        return Accounting(
            rate=Fraction(m * l, N * l),
            rho=Fraction(T, m),
            rho_threshold=rho_threshold(N, T, B),
            download_symbols=download,
            secret_symbols=alpha * (N - B + 1),
        )
    phase1 = broadcast_cost(params)
    nominal_bits = 2 * math.log2(l) if l > 1 else 0.0
    return Accounting(
        rate=Fraction(m * l, phase1 + download),
        rho=Fraction(T * params.width, m * l),
        rho_threshold=rho_threshold(N, T, B),
        download_symbols=download,
        phase1_symbols=phase1,
        rho_phase1=Fraction((K + 1) * alpha, m * l),
        phase1_symbols_nominal=N * N * (N - params.E) * (K + 1) * alpha * nominal_bits,
    )


def broadcast_cost(params: SchemeParams) -> int:
    """Symbols spent sending p and the K message hashes bit by bit."""
    N, E, K = params.N, params.E, params.K
    return N * N * (N - E) * (K + 1) * params.alpha * params.field.bits


def union_factor(params: SchemeParams) -> int:
    return comb(params.N, params.B)
