from fractions import Fraction

import numpy as np
import pytest

from byzspir.channels import (SecretPayload, broadcast_failure_probability, broadcast_send,
                              secret_rate, secret_send)
from byzspir.errors import ConfigError
from byzspir.scheme import SchemeParams, accounting
from byzspir.sim import run_trial, trial_seed


def secret(**kw):
    return SchemeParams.create(**(dict(K=2, N=3, T=1, B=1, l=32, alpha=2, q=1031) | kw))


def untouched(**kw):
    base = dict(K=2, N=3, T=1, B=1, E=1, l=32, alpha=1, beta=1, q=1031, model="untouched")
    return SchemeParams.create(**(base | kw))


def test_secret_payload_symbols():
    p = secret()
    payload = SecretPayload((5, 7), np.zeros((2, 2), dtype=np.int64), (1, 2))
    got, event = secret_send(p, payload)
    assert got is payload
    assert event.symbols == 6 and event.secret
    assert event.as_dict()["channel"] == "secret"


def test_secret_rate_vanishes_with_l():
    assert secret_rate(secret()) == Fraction(6, 32)
    assert secret_rate(secret(l=10_000, q=None)) < Fraction(1, 1000)


def test_secret_send_preconditions():
    with pytest.raises(ConfigError):
        secret_send(secret(), SecretPayload((), np.zeros((2, 0)), (1, 2)))
    with pytest.raises(ConfigError):
        secret_send(untouched(), SecretPayload((2,), np.zeros((2, 1)), (1, 2)))


def test_broadcast_failure_rate(rng):
    p = untouched()
    assert broadcast_failure_probability(p) == Fraction(3, 1031**3)
    hashes = np.zeros((2, 1), dtype=np.int64)
    failures = sum(not broadcast_send(p, (3,), hashes, rng)[0].delivered
                   for _ in range(100_000))
    assert failures == 0


def test_broadcast_cost():
    p = SchemeParams.create(K=2, N=4, T=1, B=1, E=2, l=64, alpha=4, beta=2, q=10007,
                            model="untouched")
    sent, event = broadcast_send(p, (1, 2, 3, 4), np.zeros((2, 4), dtype=np.int64),
                                 np.random.default_rng(0))
    assert sent.cost == event.symbols == 4**2 * 2 * 3 * 4 * 14
    assert sent.per_bit_cost == 32


def test_broadcast_delivers_payload(rng):
    p = untouched()
    hashes = np.array([[17], [900]])
    sent, _ = broadcast_send(p, (3,), hashes, rng)
    assert sent.p == (3,)
    assert np.array_equal(sent.message_hashes, hashes)


def test_broadcast_preconditions(rng):
    with pytest.raises(ConfigError):
        broadcast_send(secret(), (3,), np.zeros((2, 2)), rng)


@pytest.mark.parametrize("params", [secret(), untouched(),
                                    SchemeParams.create(K=2, N=4, T=1, B=1, E=2, l=8,
                                                        alpha=4, beta=2, model="untouched")])
def test_accounting_matches_transcript(params):
    t = run_trial(params, 1, "random", trial_seed(7, 0))
    by = {e.channel: e.symbols for e in t.events}
    acc = accounting(params)
    assert by["answer"] == acc.download_symbols
    assert by["query"] == params.N * params.K * params.m
    if "secret" in by:
        assert by["secret"] == acc.secret_symbols
    else:
        assert by["broadcast"] == acc.phase1_symbols
        assert acc.rate == Fraction(params.m * params.l, by["broadcast"] + by["answer"])
