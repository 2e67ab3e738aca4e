"""End-to-end trials, Monte Carlo experiments and their reports.

Seed derivation (part of the report format, so other implementations can
reproduce classifications): trial ``i`` of an experiment with master seed
``s`` uses ``numpy.random.SeedSequence(s, spawn_key=(i,))``.  A trial seed
is spawned into six streams, in order: dataset, user, server randomness,
hash points, adversary, broadcast channel.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field, fields, replace

import numpy as np
from scipy.stats import norm

from . import adversary as adv
from .channels import SecretPayload, broadcast_send, secret_send, ChannelEvent
from .decoder import DecodeOutcome, Status, enumerate_candidates, filter_by_hashes
from .errors import ConfigError
from .hashing import answer_hashes, message_hashes, sample_points, scheme_error_bound
from .scheme import (Dataset, Model, SchemeParams, accounting, build_x_matrix, capacity,
                     capacity_omniscient_zero_error, generate_answers, generate_queries,
                     queries_from_secret)


class Classification(str, enum.Enum):
    NONE = "none"
    WRONG_MESSAGE = "wrong_message"
    AMBIGUOUS = "ambiguous"
    NO_CANDIDATE = "no_candidate"
    PHASE1_FAILURE = "phase1_failure"


_STREAMS = ("data", "user", "server", "hash", "adversary", "channel")


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


@dataclass
class TrialTranscript:
    seed: object
    params: SchemeParams
    k: int
    strategy: str
    dataset: Dataset
    U: np.ndarray
    queries: np.ndarray
    x: np.ndarray
    clean: np.ndarray
    received: np.ndarray
    corrupted: tuple
    observed: tuple
    hash_p: tuple
    hash_values: np.ndarray
    events: list
    outcome: DecodeOutcome | None
    classification: Classification
    candidates: list = dc_field(default_factory=list)


def run_trial(params: SchemeParams, k: int, strategy: str, seed) -> TrialTranscript:
    """Run the full protocol once and classify the outcome against the truth."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = dict(zip(_STREAMS, ss.spawn(len(_STREAMS))))
    rng = {name: np.random.default_rng(s) for name, s in streams.items()
           if name != "adversary"}
    f = params.field

    dataset = Dataset.random(params, rng["data"])
    qa = generate_queries(params, k, rng["user"])
    common_s = f.random(rng["server"], (params.T, params.width))
    x = build_x_matrix(params, dataset, k, qa.U, common_s)
    clean = generate_answers(params, x)
    events = [
        ChannelEvent("query", "user->server", qa.queries.size, False),
        ChannelEvent("answer", "server->user", clean.values.size, False),
    ]

    p = sample_points(f, params.alpha, rng["hash"])
    phase1_ok = True
    if params.model is Model.SECRET_CHANNEL:
        bundle = answer_hashes(params, clean.values, p)
        payload, ev = secret_send(params, SecretPayload(p, bundle.values, bundle.servers))
        events.append(ev)
    else:
        bundle = message_hashes(params, dataset, p)
        sent, ev = broadcast_send(params, p, bundle.values, rng["channel"])
        events.append(ev)
        phase1_ok = sent.delivered

    strat = adv.make_strategy(strategy, leak_p=p, leak_hashes=bundle.values)
    state = adv.AdversaryState.create(params, strat, streams["adversary"])
    targets = adv.choose_targets(state, params)
    received = adv.corrupt(state, params, clean, qa.queries, targets)

    candidates = enumerate_candidates(params, received.values)
    if not phase1_ok:
        outcome = None
        cls = Classification.PHASE1_FAILURE
    else:
        outcome = filter_by_hashes(params, candidates, bundle, k)
        if outcome.status is Status.DECODED:
            outcome.true_positive = bool(np.array_equal(outcome.message,
                                                        dataset.payload(params, k)))
            cls = Classification.NONE if outcome.true_positive else Classification.WRONG_MESSAGE
        elif outcome.status is Status.AMBIGUOUS:
            cls = Classification.AMBIGUOUS
        else:
            cls = Classification.NO_CANDIDATE
    return TrialTranscript(
        seed=ss.entropy if not ss.spawn_key else (ss.entropy, ss.spawn_key),
        params=params, k=k, strategy=strategy, dataset=dataset, U=qa.U, queries=qa.queries,
        x=x, clean=clean.values, received=received.values, corrupted=received.corrupted,
        observed=state.observed, hash_p=p, hash_values=bundle.values, events=events,
        outcome=outcome, classification=cls, candidates=candidates,
    )


# experiments

@dataclass
class ExperimentConfig:
    model: str = "secret"
    n: int = 3
    t: int = 1
    b: int = 1
    e: int = 0
    k_messages: int = 2
    l: int = 32
    q: int | None = None
    alpha: int = 2
    beta: int = 0
    strategy: str = "random"
    trials: int = 1000
    seed: int = 0
    index: int = 1
    hash_check: str = "all"
    workers: int = 1

    def params(self) -> SchemeParams:
        return SchemeParams.create(
            K=self.k_messages, N=self.n, T=self.t, B=self.b, l=self.l, alpha=self.alpha,
            model=self.model, E=self.e, beta=self.beta, q=self.q, hash_check=self.hash_check)


_INT_KEYS = {f.name for f in fields(ExperimentConfig)} - {"model", "strategy", "hash_check"}


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``overrides`` (e.g. CLI flags) win over the text."""
    values = {}
    errors = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors[f"line {lineno}"] = f"expected 'key = value', got {raw!r}"
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_").lower()] = val
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key.replace("-", "_").lower()] = val
    known = {f.name for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, val in values.items():
        if key not in known:
            errors[key] = "unknown key"
            continue
        if key in _INT_KEYS:
            try:
                kwargs[key] = None if (key == "q" and str(val).lower() in ("", "auto")) \
                    else int(val)
            except ValueError:
                errors[key] = f"expected an integer, got {val!r}"
        else:
            kwargs[key] = str(val)
    if errors:
        raise ConfigError(errors)
    cfg = ExperimentConfig(**kwargs)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> SchemeParams:
    errors = {}
    if cfg.model not in ("secret", "untouched"):
        errors["model"] = "must be 'secret' or 'untouched'"
    if cfg.strategy not in adv.STRATEGIES:
        errors["strategy"] = f"must be one of {sorted(adv.STRATEGIES)}"
    if cfg.trials < 0:
        errors["trials"] = "must be >= 0"
    if cfg.workers < 1:
        errors["workers"] = "must be >= 1"
    if errors:
        raise ConfigError(errors)
    params = cfg.params()
    if not 1 <= cfg.index <= params.K:
        raise ConfigError({"index": f"must lie in [1, {params.K}]"})
    return params


def wilson_upper(errors: int, trials: int, confidence: float = 0.99) -> float:
    """Upper end of the two-sided Wilson score interval."""
    if trials == 0:
        return float("nan")
    z = norm.ppf(1 - (1 - confidence) / 2)
    p = errors / trials
    denom = 1 + z * z / trials
    centre = p + z * z / (2 * trials)
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return min(1.0, (centre + half) / denom)


@dataclass
class ExperimentReport:
    config: dict
    trials: int
    counts: dict
    errors: int
    err_rate: float | None
    err_ucb99: float | None
    err_rule_of_three: float | None
    analytic_bound: float
    analytic_bound_nominal: float
    rate: float
    rate_exact: str
    rate_capacity: float
    capacity_omniscient: float
    rho: float
    rho_threshold: float
    q: int
    secret_symbols: int
    phase1_symbols: int
    seconds: float

    def row(self) -> dict:
        c = self.config
        return {
            "model": c["model"], "N": c["n"], "T": c["t"], "B": c["b"], "E": c["e"],
            "K": c["k_messages"], "l": c["l"], "q": self.q, "alpha": c["alpha"],
            "beta": c["beta"], "strategy": c["strategy"], "trials": self.trials,
            "errors": self.errors, "err_rate": self.err_rate, "err_ucb99": self.err_ucb99,
            "analytic_bound": self.analytic_bound, "rate": self.rate,
            "rate_capacity": self.rate_capacity, "rho": self.rho,
            "rho_threshold": self.rho_threshold, "seconds": self.seconds,
        }


CSV_COLUMNS = ("model", "N", "T", "B", "E", "K", "l", "q", "alpha", "beta", "strategy",
               "trials", "errors", "err_rate", "err_ucb99", "analytic_bound", "rate",
               "rate_capacity", "rho", "rho_threshold", "seconds")


def _count_range(cfg: ExperimentConfig, start: int, stop: int) -> dict:
    params = cfg.params()
    counts = {c.value: 0 for c in Classification}
    for i in range(start, stop):
        t = run_trial(params, cfg.index, cfg.strategy, trial_seed(cfg.seed, i))
        counts[t.classification.value] += 1
    return counts


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run ``cfg.trials`` seeded trials and compare against the analytic figures."""
    params = validate_config(cfg)
    start = time.perf_counter()
    if cfg.workers > 1 and cfg.trials > cfg.workers:
        edges = np.linspace(0, cfg.trials, cfg.workers + 1).astype(int)
        with ProcessPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(_count_range, [cfg] * cfg.workers, edges[:-1], edges[1:]))
        counts = {c.value: sum(p[c.value] for p in parts) for c in Classification}
    else:
        counts = _count_range(cfg, 0, cfg.trials)
    seconds = time.perf_counter() - start

    n = cfg.trials
    errors = n - counts[Classification.NONE.value]
    acc = accounting(params)
    bound = scheme_error_bound(params)
    return ExperimentReport(
        config=asdict(cfg) | {"q": params.q},
        trials=n,
        counts=counts,
        errors=errors,
        err_rate=errors / n if n else None,
        err_ucb99=wilson_upper(errors, n) if n else None,
        err_rule_of_three=4.6 / n if n and errors == 0 else None,
        analytic_bound=float(bound.actual),
        analytic_bound_nominal=float(bound.nominal),
        rate=float(acc.rate),
        rate_exact=str(acc.rate),
        rate_capacity=float(capacity(params.N, params.T, params.B, acc.rho)),
        capacity_omniscient=float(capacity_omniscient_zero_error(params.N, params.T, params.B)),
        rho=float(acc.rho),
        rho_threshold=float(acc.rho_threshold),
        q=params.q,
        secret_symbols=acc.secret_symbols,
        phase1_symbols=acc.phase1_symbols,
        seconds=round(seconds, 3),
    )


def emit_report(reports, fmt: str = "csv") -> bytes:
    """Serialize one report or a list of them as CSV rows or a JSON array."""
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in reports:
            w.writerow({k: ("" if v is None else v) for k, v in r.row().items()})
        return buf.getvalue().encode()
    if fmt == "json":
        return (json.dumps([asdict(r) for r in reports], indent=2, sort_keys=True) + "\n").encode()
    raise ConfigError({"format": f"unknown format {fmt!r}; use csv or json"})


def parse_report(data: bytes, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`emit_report`, returning one dict per report."""
    text = data.decode()
    if fmt == "json":
        return json.loads(text)
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        out = {}
        for key, val in row.items():
            if val == "":
                out[key] = None
            elif key in ("model", "strategy"):
                out[key] = val
            elif key in ("err_rate", "err_ucb99", "analytic_bound", "rate", "rate_capacity",
                         "rho", "rho_threshold", "seconds"):
                out[key] = float(val)
            else:
                out[key] = int(val)
        rows.append(out)
    return rows


def expand_sweep(cfg: ExperimentConfig, ls) -> list[ExperimentConfig]:
    """One config per value of ``l``, each with q re-derived unless it was pinned."""
    return [replace(cfg, l=int(l)) for l in ls]


def golden_transcript_check(q: int = 5) -> dict:
    """Replay the three-server, one-colluder, one-adversary toy instance symbolically.

    Every assignment of (u, v, a, b, S) over GF(q) is substituted; the queries
    must be ([u+1, v], [u+2, v], [u, v]) and the answers (X+a, X+2a, X) with
    X = ua + vb + S.  Two-instance answer hashes must equal p A + p^2 A', and
    padded message hashes p a + p^2 a' + p^3 S_a.
    """
    lam = (1, 2, 0)
    one = SchemeParams.create(K=2, N=3, T=1, B=1, l=1, alpha=1, q=q, lambdas=lam,
                              allow_zero_lambda=True)
    two = SchemeParams.create(K=2, N=3, T=1, B=1, l=2, alpha=1, q=q, lambdas=lam,
                              allow_zero_lambda=True)
    padded = SchemeParams.create(K=2, N=3, T=1, B=1, E=1, l=2, alpha=1, beta=1, q=q,
                                 model="untouched", lambdas=lam, allow_zero_lambda=True)
    checks = {"queries": 0, "answers": 0, "answer_hash": 0, "message_hash": 0}
    failures = []
    for u, v, a, b, s in np.ndindex(*(q,) * 5):
        qa = queries_from_secret(one, 1, np.array([[u, v]]))
        want_q = np.array([[u + 1, v], [u + 2, v], [u, v]]) % q
        if np.array_equal(qa.queries, want_q):
            checks["queries"] += 1
        else:
            failures.append(("queries", (u, v, a, b, s)))
        x = build_x_matrix(one, Dataset(np.array([[a], [b]])), 1, qa.U, np.array([[s]]))
        X = (u * a + v * b + s) % q
        answers = generate_answers(one, x).values[:, 0]
        if np.array_equal(answers, np.array([X + a, X + 2 * a, X]) % q):
            checks["answers"] += 1
        else:
            failures.append(("answers", (u, v, a, b, s)))

        # second instance (a', b', S') = (b, a, u): any fixed assignment works
        data2 = Dataset(np.array([[a, b], [b, a]]))
        x2 = build_x_matrix(two, data2, 1, qa.U, np.array([[s, u]]))
        A = generate_answers(two, x2).values
        p = 1 + (u + v + s) % (q - 1)
        H = answer_hashes(two, A, (p,)).values[:, 0]
        want_h = (p * A[:2, 0] + p * p * A[:2, 1]) % q
        if np.array_equal(H, want_h):
            checks["answer_hash"] += 1
        else:
            failures.append(("answer_hash", (u, v, a, b, s)))

        data3 = Dataset(np.array([[a, b, s], [b, a, u]]))
        Hm = message_hashes(padded, data3, (p,)).values[:, 0]
        want_m = np.array([p * a + p**2 * b + p**3 * s, p * b + p**2 * a + p**3 * u]) % q
        if np.array_equal(Hm, want_m):
            checks["message_hash"] += 1
        else:
            failures.append(("message_hash", (u, v, a, b, s)))
    total = q**5
    return {"q": q, "assignments": total, "checks": checks,
            "passed": not failures, "failures": failures[:10]}
