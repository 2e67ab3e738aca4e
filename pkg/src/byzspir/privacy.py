"""Exact checks of user privacy and database privacy on tiny instances.

The exhaustive audits enumerate every value of every random variable in
play, so each outcome has probability ``count / total`` and the results
are exact.  They are meant for fields of size 3 to 7 and a handful of
symbols; :class:`BudgetExceeded` is raised before anything large starts.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from .errors import BudgetExceeded
from .field import is_invertible
from .hashing import answer_hashes, message_hashes
from .scheme import (Dataset, Model, SchemeParams, build_x_matrix, generate_answers,
                     queries_from_secret)

MAX_STATES = 10**8


@dataclass(frozen=True)
class AuditInstance:
    params: SchemeParams
    budget: int = 10**7

    def guard(self, states: int):
        limit = min(self.budget, MAX_STATES)
        if states > limit:
            raise BudgetExceeded(f"{states} states exceed the budget of {limit}")


def certify_user_privacy_algebraic(params: SchemeParams, lambdas=None):
    """Check every T x T row minor of the query randomness generator.

    If all are invertible, any T servers see queries that are uniform
    whatever the index.  Returns ``(ok, witness)``; the witness is the first
    server subset with a singular minor, or None.  ``lambdas`` overrides the
    evaluation points (to audit point sets the constructor would refuse).
    """
    f = params.field
    lam = params.lambdas if lambdas is None else tuple(lambdas)
    T = params.T
    if T == 0:
        return True, None
    G_U = f.array([f.powers(x, 0, T) for x in lam]).reshape(len(lam), T)
    for subset in combinations(range(len(lam)), T):
        if not is_invertible(f, G_U[list(subset)]):
            return False, tuple(n + 1 for n in subset)
    return True, None


def _all_arrays(q: int, shape):
    size = int(np.prod(shape)) if len(shape) else 1
    for vals in product(range(q), repeat=size):
        yield np.array(vals, dtype=np.int64).reshape(shape)


def audit_user_privacy_exhaustive(instance: AuditInstance, k1: int, k2: int,
                                  variant: str | None = None) -> Fraction:
    """Largest total-variation distance, over T-server subsets, between the
    joint law of (queries, answers, data, shared randomness) seen by the
    subset when the user wants ``k1`` versus ``k2``.

    ``variant="leaky_queries"`` drops the user's randomness (negative control).
    """
    params = instance.params
    q, T, K, m = params.q, params.T, params.K, params.m
    u_size = T * K * m
    w_shape = (K, params.message_length)
    s_shape = (T, params.width)
    states = q ** (u_size + int(np.prod(w_shape)) + int(np.prod(s_shape)))
    instance.guard(2 * states)

    subsets = list(combinations(range(params.N), T))
    laws = []
    for k in (k1, k2):
        counters = [Counter() for _ in subsets]
        if variant == "leaky_queries":
            us = [np.zeros((T, K * m), dtype=np.int64)] * q ** u_size
        else:
            us = list(_all_arrays(q, (T, K * m)))
        query_sets = [queries_from_secret(params, k, U) for U in us]
        for W in _all_arrays(q, w_shape):
            data = Dataset(W)
            wkey = W.tobytes()
            for S in _all_arrays(q, s_shape):
                skey = S.tobytes()
                for qa in query_sets:
                    X = build_x_matrix(params, data, k, qa.U, S)
                    A = generate_answers(params, X).values
                    for c, sub in zip(counters, subsets):
                        rows = list(sub)
                        c[(qa.queries[rows].tobytes(), A[rows].tobytes(), wkey, skey)] += 1
        laws.append(counters)
    worst = Fraction(0)
    for c1, c2 in zip(*laws):
        total = sum(c1.values())
        diff = sum(abs(c1.get(x, 0) - c2.get(x, 0)) for x in set(c1) | set(c2))
        worst = max(worst, Fraction(diff, 2 * total))
    return worst


@dataclass(frozen=True)
class MIResult:
    mutual_information: float   # in base-q units
    independent: bool           # exact check that the joint law factorizes
    states: int

    def __float__(self):
        return self.mutual_information


def _mutual_information(joint: Counter, q: int) -> MIResult:
    total = sum(joint.values())
    left, right = Counter(), Counter()
    for (a, b), c in joint.items():
        left[a] += c
        right[b] += c
    independent = len(joint) == len(left) * len(right) and all(
        c * total == left[a] * right[b] for (a, b), c in joint.items())
    if independent:
        return MIResult(0.0, True, total)
    mi = math.fsum(c / total * math.log(c * total / (left[a] * right[b]), q)
                   for (a, b), c in joint.items())
    return MIResult(mi, False, total)


def audit_database_privacy_exhaustive(instance: AuditInstance, k: int,
                                      variant: str | None = None) -> MIResult:
    """Mutual information between the undesired messages and everything the user sees.

    The user's view is its own randomness (which fixes every query), all N
    answers, the hash points and the hash values.  ``variant="unmasked"``
    zeroes the servers' masking randomness and ``variant="unpadded"`` zeroes
    the randomness appended to messages (negative controls).
    """
    params = instance.params
    q, T, K, m = params.q, params.T, params.K, params.m
    payload = m * params.l
    pad = params.message_length - payload
    u_size = T * K * m
    s_size = T * params.width
    alpha = params.alpha
    p_choices = list(permutations(range(1, q), alpha))
    free_s = 0 if variant == "unmasked" else s_size
    free_pad = 0 if variant == "unpadded" else K * pad
    states = q ** (u_size + K * payload + free_s + free_pad) * len(p_choices)
    instance.guard(states)

    other = [i for i in range(K) if i != k - 1]
    joint = Counter()
    us = list(_all_arrays(q, (T, K * m)))
    query_sets = [queries_from_secret(params, k, U) for U in us]
    for Wp in _all_arrays(q, (K, payload)):
        secret_key = Wp[other].tobytes()
        for padding in _all_arrays(q, (K, pad if free_pad else 0)):
            if not free_pad:
                padding = np.zeros((K, pad), dtype=np.int64)
            data = Dataset(np.concatenate([Wp, padding], axis=1))
            for S in _all_arrays(q, (T, params.width) if free_s else (0,)):
                if not free_s:
                    S = np.zeros((T, params.width), dtype=np.int64)
                for qa in query_sets:
                    A = generate_answers(params, build_x_matrix(params, data, k, qa.U, S)).values
                    base = qa.U.tobytes() + A.tobytes()
                    for p in p_choices:
                        if params.model is Model.SECRET_CHANNEL:
                            h = answer_hashes(params, A, p).values
                        else:
                            h = message_hashes(params, data, p).values
                        joint[(secret_key, (base, p, h.tobytes()))] += 1
    return _mutual_information(joint, q)


def query_marginal_uniform(params: SchemeParams, k: int, subset) -> bool:
    """Whether the queries of a T-server ``subset`` are uniform as U ranges over everything."""
    q, T, K, m = params.q, params.T, params.K, params.m
    counts = Counter()
    for U in _all_arrays(q, (T, K * m)):
        Q = queries_from_secret(params, k, U).queries[[n - 1 for n in subset]]
        counts[Q.tobytes()] += 1
    return len(counts) == q ** (T * K * m) and set(counts.values()) == {1}
