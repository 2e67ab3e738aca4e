"""Transports the adversary can neither read nor write.

The secure broadcast of the untouched-server model is an idealization: it
delivers its payload intact except for an injected failure with
probability ``N / q**N`` and charges ``N^2 (N-E)`` symbols per payload bit.
The network code that would realize it is not implemented.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError
from .scheme import Model, SchemeParams, broadcast_cost


@dataclass(frozen=True)
class ChannelEvent:
    channel: str     # "query", "answer", "secret", "broadcast"
    direction: str   # "user->server", "server->user"
    symbols: int
    secret: bool

    def as_dict(self):
        return {"channel": self.channel, "direction": self.direction,
                "symbols": self.symbols, "secret": self.secret}


@dataclass
class SecretPayload:
    p: tuple
    values: np.ndarray          # (N-B) x alpha answer hashes
    hash_servers: tuple
    p_server: int = 1

    @property
    def symbol_count(self) -> int:
        return len(self.p) * (len(self.hash_servers) + 1)


def secret_send(params: SchemeParams, payload: SecretPayload):
    """Deliver ``payload`` verbatim over the per-server secret channels."""
    if params.model is not Model.SECRET_CHANNEL:
        raise ConfigError({"model": "secret channels exist only in the secret channel model"})
    if len(payload.p) < 1:
        raise ConfigError({"alpha": "secret payload needs at least one hash point"})
    event = ChannelEvent("secret", "server->user", payload.symbol_count, True)
    return payload, event


def secret_rate(params: SchemeParams) -> Fraction:
    """Secret-channel symbols per retrieved message symbol."""
    return Fraction(params.alpha * (params.N - params.B + 1), params.m * params.l)


@dataclass
class SecureBroadcast:
    p: tuple
    message_hashes: np.ndarray   # K x alpha
    cost: int
    failure_probability: Fraction
    delivered: bool
    per_bit_cost: int = 0


def broadcast_failure_probability(params: SchemeParams) -> Fraction:
    return Fraction(params.N, params.q ** params.N)


def broadcast_send(params: SchemeParams, p, message_hashes: np.ndarray,
                   rng: np.random.Generator) -> tuple[SecureBroadcast, ChannelEvent]:
    """Send ``p`` and the message hashes; fails with probability ``N / q**N``."""
    if params.model is not Model.UNTOUCHED_SERVER:
        raise ConfigError({"model": "secure broadcast is used only in the untouched model"})
    if params.E + params.B >= params.N:
        raise ConfigError({"E": "secure broadcast requires E+B < N"})
    fail_p = broadcast_failure_probability(params)
    delivered = not (rng.random() < float(fail_p))
    cost = broadcast_cost(params)
    per_bit = params.N ** 2 * (params.N - params.E)
    out = SecureBroadcast(tuple(p), message_hashes, cost, fail_p, delivered, per_bit)
    return out, ChannelEvent("broadcast", "server->user", cost, True)
