"""Limited-knowledge Byzantine adversaries.

A strategy only ever receives the adversary's private randomness and an
:class:`AdversaryView`, which holds exactly what its model lets it see:
every query and answer in the secret channel model, the traffic of the
observed set in the untouched server model.  Hashes and hash points never
enter a view.  :class:`KnownPForgery` breaks this on purpose and refuses to
be built unless ``ablation=True``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError
from .field import Field, poly_from_roots, poly_mul
from .scheme import AnswerSet, Model, SchemeParams

_SETUP, _TARGETS, _CORRUPT = 0, 1, 2


@dataclass(frozen=True)
class AdversaryView:
    queries: dict   # server -> query row
    answers: dict   # server -> answer row

    @property
    def servers(self) -> tuple:
        return tuple(sorted(self.answers))


def annihilating_delta(field: Field, roots, length: int, rng: np.random.Generator,
                       constant_term: bool = False) -> np.ndarray:
    """A random nonzero coefficient vector whose polynomial vanishes at ``roots``.

    Without ``constant_term`` the vector holds the coefficients of
    ``x, x^2, ..., x^length`` (the hash exponents); otherwise of
    ``1, x, ..., x^(length-1)``.  At most ``length - 1`` roots are used.
    """
    degree = length if not constant_term else length - 1
    base = 1 if not constant_term else 0
    roots = list(dict.fromkeys(int(r) % field.modulus for r in roots))
    roots = [r for r in roots if r != 0 or constant_term][: degree - base]
    core = poly_from_roots(field, roots)
    free = degree - base - len(roots)
    mult = field.random(rng, free + 1)
    mult[-1] = field.random(rng, (), nonzero=True)
    poly = poly_mul(field, core, mult)
    if base:
        poly = np.concatenate([field.zeros(1), poly])
    return field.array(poly[base: base + length])


def forge_row(field: Field, row, p: int, h: int, rng: np.random.Generator) -> np.ndarray:
    """A row different from ``row`` that hashes to ``h`` at the known point ``p``."""
    row = field.array(row)
    if row.size < 2:
        raise ValueError("a one-symbol row has a unique preimage; nothing to forge")
    forged = row.copy()
    forged[1:] = field.add(forged[1:], field.random(rng, row.size - 1))
    if np.array_equal(forged[1:], row[1:]):
        forged[1] = field.add(forged[1], 1)
    pw = field.powers(p, 2, row.size + 1)
    partial = sum(int(c) * w for c, w in zip(forged[1:], pw)) % field.modulus
    forged[0] = (int(h) - partial) * field.inv(p) % field.modulus
    return forged


class Strategy:
    name = "abstract"
    needs_answers = False

    def forge(self, params: SchemeParams, rng: np.random.Generator, view: AdversaryView,
              targets: tuple) -> dict:
        """Replacement answer rows for (a subset of) ``targets``."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class Passive(Strategy):
    name = "passive"

    def forge(self, params, rng, view, targets):
        return {}


class RandomOverwrite(Strategy):
    name = "random"

    def forge(self, params, rng, view, targets):
        return {b: params.field.random(rng, params.width) for b in targets}


class AdditiveNoise(Strategy):
    """Adds nonzero uniform symbols to every observed target answer.

    An unobserved target can only be overwritten blindly.
    """

    name = "additive"
    needs_answers = True

    def forge(self, params, rng, view, targets):
        f = params.field
        out = {}
        for b in targets:
            if b in view.answers:
                out[b] = f.add(view.answers[b], f.random(rng, params.width, nonzero=True))
            else:
                out[b] = f.random(rng, params.width)
        return out


class _AnnihilatingForgery(Strategy):
    needs_answers = True

    def _roots(self, params, rng):
        raise NotImplementedError

    def forge(self, params, rng, view, targets):
        f = params.field
        roots = self._roots(params, rng)
        if params.model is Model.UNTOUCHED_SERVER:
            # message hashes see instance i through p**(i*m)
            roots = [f.pow(r, params.m) for r in roots]
            constant_term = True
        else:
            constant_term = False
        out = {}
        for b in targets:
            if b not in view.answers:
                out[b] = f.random(rng, params.width)
                continue
            delta = annihilating_delta(f, roots, params.width, rng, constant_term)
            out[b] = f.add(view.answers[b], delta)
        return out


class HashGuess(_AnnihilatingForgery):
    """Guesses hash points and adds an error invisible at every guess.

    ``guesses=None`` uses as many guesses as the error polynomial's degree
    allows, which maximizes the chance of covering the real points.
    """

    name = "hashguess"

    def __init__(self, guesses: int | None = None):
        self.guesses = guesses

    def _roots(self, params, rng):
        cap = params.width - 1
        g = cap if self.guesses is None else min(self.guesses, cap)
        g = min(g, params.q - 1)
        picks = rng.choice(params.q - 1, size=g, replace=False) + 1 if g else []
        return [int(x) for x in picks]

    def __repr__(self):
        return f"HashGuess(guesses={self.guesses})"


class KnownPForgery(_AnnihilatingForgery):
    """Ablation: the adversary has been handed the secret hash points."""

    name = "knownp"

    def __init__(self, p, hashes=None, ablation: bool = False):
        if not ablation:
            raise ConfigError({"strategy": "KnownPForgery violates the adversary model; "
                                           "pass ablation=True to use it"})
        self.p = tuple(int(x) for x in p)
        self.hashes = hashes

    def _roots(self, params, rng):
        return list(self.p)

    def __repr__(self):
        return f"KnownPForgery(p={self.p})"


STRATEGIES = {cls.name: cls for cls in (Passive, RandomOverwrite, AdditiveNoise, HashGuess,
                                        KnownPForgery)}


def make_strategy(name: str, leak_p=None, leak_hashes=None) -> Strategy:
    if name not in STRATEGIES:
        raise ConfigError({"strategy": f"unknown strategy {name!r}; "
                                       f"choose from {sorted(STRATEGIES)}"})
    if name == "knownp":
        if leak_p is None:
            raise ConfigError({"strategy": "knownp needs the leaked hash points"})
        return KnownPForgery(leak_p, leak_hashes, ablation=True)
    return STRATEGIES[name]()


@dataclass
class AdversaryState:
    model: Model
    strategy: Strategy
    gamma: np.random.SeedSequence
    observed: tuple = ()
    _streams: list = dc_field(default=None, repr=False)

    @classmethod
    def create(cls, params: SchemeParams, strategy: Strategy, gamma) -> "AdversaryState":
        """Set up an adversary; in the untouched model it picks its observed set now."""
        if not isinstance(gamma, np.random.SeedSequence):
            gamma = np.random.SeedSequence(gamma)
        state = cls(params.model, strategy, gamma)
        state._streams = gamma.spawn(3)
        if params.model is Model.UNTOUCHED_SERVER:
            rng = np.random.default_rng(state._streams[_SETUP])
            pick = rng.choice(params.N, size=params.E, replace=False) + 1
            state.observed = tuple(sorted(int(x) for x in pick))
        return state

    def rng(self, which: int) -> np.random.Generator:
        return np.random.default_rng(self._streams[which])


def choose_targets(state: AdversaryState, params: SchemeParams) -> tuple:
    """The corrupted server set (1-based), of size B."""
    rng = state.rng(_TARGETS)
    if state.model is Model.UNTOUCHED_SERVER and state.strategy.needs_answers \
            and params.B <= len(state.observed):
        pool = np.array(state.observed)
    else:
        pool = np.arange(1, params.N + 1)
    pick = rng.choice(pool, size=params.B, replace=False)
    return tuple(sorted(int(x) for x in pick))


def observe(state: AdversaryState, params: SchemeParams, queries: np.ndarray,
            answers: np.ndarray) -> AdversaryView:
    if state.model is Model.SECRET_CHANNEL:
        seen = range(1, params.N + 1)
    else:
        seen = state.observed
    return AdversaryView(
        queries={n: np.array(queries[n - 1]) for n in seen},
        answers={n: np.array(answers[n - 1]) for n in seen},
    )


def corrupt(state: AdversaryState, params: SchemeParams, clean: AnswerSet,
            queries: np.ndarray, targets: tuple) -> AnswerSet:
    """Apply the strategy to the answers of ``targets``; other rows are untouched."""
    if len(targets) != params.B:
        raise ConfigError({"B": f"expected {params.B} targets, got {len(targets)}"})
    view = observe(state, params, queries, clean.values)
    rows = state.strategy.forge(params, state.rng(_CORRUPT), view, tuple(targets))
    stray = set(rows) - set(targets)
    if stray:
        raise RuntimeError(f"strategy touched non-target servers {sorted(stray)}")
    out = clean.values.copy()
    for b, row in rows.items():
        out[b - 1] = row
    return AnswerSet(out, tuple(sorted(rows)))
