"""List decoding of corrupted answers.

Every size-B subset of servers is tried as the corrupted set; each guess
gives one exact solution of ``[G Bhat] [X; Z] = received``.  The hashes then
pick the right one.  More than one distinct surviving ``X`` is reported as
ambiguous rather than resolved by an arbitrary choice.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import ShapeMismatch
from .field import invert
from .hashing import Flavor, HashBundle, verify, x_row_hashes
from .scheme import SchemeParams, build_generators


class Status(str, enum.Enum):
    DECODED = "decoded"
    AMBIGUOUS = "ambiguous"
    NO_CANDIDATE = "no_candidate"


@dataclass
class CandidateSolution:
    hypothesis: tuple      # servers assumed corrupted (1-based)
    x_hat: np.ndarray      # (N-B) x width
    z_hat: np.ndarray      # B x width


@dataclass
class DecodeOutcome:
    status: Status
    message: np.ndarray | None = None
    instances: int = 0
    passing: list = dc_field(default_factory=list)
    x_hat: np.ndarray | None = None
    true_positive: bool | None = None


def indicator_matrix(params: SchemeParams, hypothesis: tuple) -> np.ndarray:
    """N x B matrix with a single 1 per column, in the rows of ``hypothesis``."""
    out = params.field.zeros((params.N, len(hypothesis)))
    for c, n in enumerate(hypothesis):
        out[n - 1, c] = 1
    return out


@lru_cache(maxsize=64)
def hypothesis_inverses(params: SchemeParams):
    """``(hypothesis, [G Bhat]^-1)`` for every size-B server subset."""
    _, _, G = build_generators(params)
    out = []
    for hyp in combinations(range(1, params.N + 1), params.B):
        system = np.concatenate([G, indicator_matrix(params, hyp)], axis=1)
        inv = invert(params.field, system)
        inv.setflags(write=False)
        out.append((hyp, inv))
    return tuple(out)


def enumerate_candidates(params: SchemeParams, received: np.ndarray) -> list[CandidateSolution]:
    received = np.asarray(received)
    if received.shape != (params.N, params.width):
        raise ShapeMismatch(f"received answers have shape {received.shape}")
    f = params.field
    rows = params.N - params.B
    out = []
    for hyp, inv in hypothesis_inverses(params):
        sol = f.matmul(inv, received)
        out.append(CandidateSolution(hyp, sol[:rows], sol[rows:]))
    return out


def extract_message(x_hat: np.ndarray, params: SchemeParams) -> np.ndarray:
    """Flatten the message rows of ``x_hat`` into the stored message layout.

    The first ``m * l`` symbols are the message, the rest its padding.
    """
    if x_hat.shape[0] != params.N - params.B:
        raise ShapeMismatch(f"x_hat has {x_hat.shape[0]} rows, expected {params.N - params.B}")
    return x_hat[params.T:].T.reshape(-1).copy()


def _key(a: np.ndarray):
    return a.tobytes() if a.dtype != object else tuple(a.ravel())


def _passes(params: SchemeParams, x_hat, bundle: HashBundle, k: int, row_bundle) -> bool:
    f = params.field
    if bundle.flavor is Flavor.MESSAGE:
        full = extract_message(x_hat, params)
        target = HashBundle(bundle.p, bundle.values[k - 1: k], Flavor.MESSAGE)
        return bool(verify(f, full, target)[0])
    if params.hash_check == "message":
        sub = HashBundle(row_bundle.p, row_bundle.values[params.T:], Flavor.ANSWER)
        return bool(np.all(verify(f, x_hat[params.T:], sub)))
    return bool(np.all(verify(f, x_hat, row_bundle)))


def filter_by_hashes(params: SchemeParams, candidates: list[CandidateSolution],
                     bundle: HashBundle, k: int) -> DecodeOutcome:
    """Keep the candidates consistent with the hashes and decide."""
    row_bundle = x_row_hashes(params, bundle) if bundle.flavor is Flavor.ANSWER else None
    survivors = {}
    passing = []
    for cand in candidates:
        key = _key(cand.x_hat)
        if key in survivors:
            if survivors[key] is not None:
                passing.append(cand.hypothesis)
            continue
        ok = _passes(params, cand.x_hat, bundle, k, row_bundle)
        survivors[key] = cand.x_hat if ok else None
        if ok:
            passing.append(cand.hypothesis)
    distinct = [x for x in survivors.values() if x is not None]
    if not distinct:
        return DecodeOutcome(Status.NO_CANDIDATE)
    if len(distinct) > 1:
        return DecodeOutcome(Status.AMBIGUOUS, passing=passing)
    x_hat = distinct[0]
    message = extract_message(x_hat, params)[: params.m * params.l]
    return DecodeOutcome(Status.DECODED, message, params.l, passing, x_hat)
