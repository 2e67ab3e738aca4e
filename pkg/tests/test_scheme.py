from fractions import Fraction
from itertools import combinations
import math

import numpy as np
import pytest

from byzspir.errors import ConfigError
from byzspir.field import Field, invert, is_invertible, vandermonde
from byzspir.scheme import (Dataset, SchemeParams, accounting, build_generators, build_x_matrix,
                            capacity, capacity_omniscient_zero_error, generate_answers,
                            generate_queries, queries_from_secret, server_answer)


def toy(q=5, l=1):
    return SchemeParams.create(K=2, N=3, T=1, B=1, l=l, alpha=1, q=q, lambdas=(1, 2, 0),
                               allow_zero_lambda=True)


def random_params(rng, model="secret"):
    N = int(rng.integers(2, 7))
    T = int(rng.integers(0, N))
    B = int(rng.integers(0, N - T))
    l = int(rng.integers(1, 5))
    return SchemeParams.create(K=int(rng.integers(1, 4)), N=N, T=T, B=B, l=l, alpha=1,
                               q=smallest_prime_over(max(l * l, N + 1, 11)))


def smallest_prime_over(n):
    from byzspir.field import smallest_prime_at_least
    return smallest_prime_at_least(n)


# parameters

def test_params_refuse_zero_capacity():
    with pytest.raises(ConfigError) as exc:
        SchemeParams.create(K=2, N=3, T=1, B=2, l=2, alpha=1)
    assert "N" in exc.value.fields


def test_params_untouched_needs_e_plus_b_below_n():
    with pytest.raises(ConfigError) as exc:
        SchemeParams.create(K=2, N=4, T=1, B=1, E=3, l=4, alpha=2, beta=1, model="untouched")
    assert "E" in exc.value.fields


def test_params_reject_zero_lambda_without_override():
    with pytest.raises(ConfigError) as exc:
        SchemeParams.create(K=2, N=3, T=1, B=1, l=2, alpha=1, q=5, lambdas=(1, 2, 0))
    assert "lambdas" in exc.value.fields


def test_params_need_q_at_least_l_squared():
    with pytest.raises(ConfigError) as exc:
        SchemeParams.create(K=2, N=3, T=1, B=1, l=8, alpha=1, q=61)
    assert "q" in exc.value.fields


def test_default_q_and_lambdas():
    p = SchemeParams.create(K=2, N=3, T=1, B=1, l=32, alpha=2)
    assert p.q == 1031
    assert p.lambdas == (1, 2, 3)


# generators

def test_generators_small():
    p = SchemeParams.create(K=2, N=3, T=1, B=1, l=2, alpha=1, q=7)
    G_U, G_e, G = build_generators(p)
    assert G_U.tolist() == [[1], [1], [1]]
    assert G_e.tolist() == [[1], [2], [3]]
    assert G.tolist() == [[1, 1], [1, 2], [1, 3]]


def test_generators_concatenate_to_vandermonde(rng):
    for _ in range(50):
        p = random_params(rng)
        G_U, G_e, G = build_generators(p)
        assert np.array_equal(np.concatenate([G_U, G_e], axis=1),
                              vandermonde(p.field, p.lambdas, p.N - p.B))
        # G_e is diag(lambda^T) times the m-column Vandermonde matrix
        for n, lam in enumerate(p.lambdas):
            for j in range(p.m):
                assert G_e[n, j] == pow(lam, p.T + j, p.q)


def test_all_square_row_submatrices_invertible():
    p = SchemeParams.create(K=2, N=4, T=2, B=1, l=2, alpha=1, q=101)
    _, _, G = build_generators(p)
    assert G.shape == (4, 3)
    for rows in combinations(range(4), 3):
        assert is_invertible(p.field, G[list(rows)])


@pytest.mark.parametrize("N", range(2, 7))
def test_generator_with_any_indicator_is_invertible(N):
    f = Field(101)
    for B in range(0, N):
        G = vandermonde(f, range(1, N + 1), N - B)
        for hyp in combinations(range(N), B):
            ind = f.zeros((N, B))
            for c, n in enumerate(hyp):
                ind[n, c] = 1
            assert is_invertible(f, np.concatenate([G, ind], axis=1))


# queries

def test_toy_queries():
    q = 5
    p = toy(q)
    for u in range(q):
        for v in range(q):
            Q = queries_from_secret(p, 1, np.array([[u, v]])).queries
            assert Q.tolist() == [[(u + 1) % q, v], [(u + 2) % q, v], [u, v]]


def test_zero_secret_leaves_selection_term():
    p = SchemeParams.create(K=3, N=5, T=2, B=1, l=2, alpha=1, q=101)
    Q = queries_from_secret(p, 2, np.zeros((p.T, p.K * p.m), dtype=np.int64)).queries
    for n, lam in enumerate(p.lambdas):
        want = [0] * (p.K * p.m)
        for j in range(p.m):
            want[p.m + j] = pow(lam, p.T + j, p.q)
        assert Q[n].tolist() == want


def test_single_query_row_uniform_for_each_index():
    q = 5
    p = SchemeParams.create(K=2, N=3, T=1, B=1, l=1, alpha=1, q=q)
    for n in range(3):
        laws = []
        for k in (1, 2):
            counts = {}
            for u in range(q):
                for v in range(q):
                    row = tuple(queries_from_secret(p, k, np.array([[u, v]])).queries[n])
                    counts[row] = counts.get(row, 0) + 1
            laws.append(counts)
        assert laws[0] == laws[1]
        assert len(laws[0]) == q * q and set(laws[0].values()) == {1}


def test_query_reconstruction(rng):
    for _ in range(20):
        p = random_params(rng)
        k = int(rng.integers(1, p.K + 1))
        qa = generate_queries(p, k, rng)
        G_U, G_e, _ = build_generators(p)
        e = np.zeros((p.m, p.K * p.m), dtype=np.int64)
        e[np.arange(p.m), (k - 1) * p.m + np.arange(p.m)] = 1
        assert np.array_equal((qa.queries - G_e @ e) % p.q, G_U @ qa.U % p.q)


def test_generate_queries_rejects_bad_index(rng):
    p = toy()
    with pytest.raises(ConfigError):
        generate_queries(p, 3, rng)


# X matrix and answers

def test_toy_x_matrix_and_answers():
    q = 5
    p = toy(q)
    for u, v, a, b, s in [(1, 2, 3, 4, 0), (4, 4, 1, 0, 2), (0, 3, 2, 2, 4)]:
        qa = queries_from_secret(p, 1, np.array([[u, v]]))
        X = build_x_matrix(p, Dataset(np.array([[a], [b]])), 1, qa.U, np.array([[s]]))
        x = (u * a + v * b + s) % q
        assert X.tolist() == [[x], [a]]
        assert generate_answers(p, X).values[:, 0].tolist() == [(x + a) % q, (x + 2 * a) % q, x]


def test_zero_dataset_and_masks_give_zero():
    p = SchemeParams.create(K=2, N=4, T=1, B=1, l=3, alpha=1, q=11)
    U = np.arange(p.T * p.K * p.m).reshape(p.T, -1)
    X = build_x_matrix(p, Dataset(np.zeros((2, p.message_length), dtype=np.int64)), 1, U,
                       np.zeros((p.T, p.width), dtype=np.int64))
    assert not X.any()
    assert not generate_answers(p, X).values.any()


def test_answers_match_server_side_computation(rng):
    for _ in range(20):
        p = random_params(rng)
        k = int(rng.integers(1, p.K + 1))
        data = Dataset.random(p, rng)
        qa = generate_queries(p, k, rng)
        S = p.field.random(rng, (p.T, p.width))
        A = generate_answers(p, build_x_matrix(p, data, k, qa.U, S)).values
        W = data.block_matrix(p)
        for n in range(p.N):
            lam = p.lambdas[n]
            for i in range(p.width):
                inner = sum(int(a) * int(w) for a, w in zip(qa.queries[n], W[:, i]))
                mask = sum(pow(lam, j, p.q) * int(S[j, i]) for j in range(p.T))
                assert A[n, i] == (inner + mask) % p.q
            assert np.array_equal(server_answer(p, n + 1, qa.queries[n], data, S), A[n])


def test_answer_rows_are_generator_rows_times_x(rng):
    p = SchemeParams.create(K=3, N=5, T=2, B=1, l=4, alpha=1, q=101)
    X = p.field.random(rng, (p.N - p.B, p.width))
    _, _, G = build_generators(p)
    A = generate_answers(p, X).values
    for n in range(p.N):
        for i in range(p.width):
            assert A[n, i] == sum(int(G[n, r]) * int(X[r, i]) for r in range(p.N - p.B)) % p.q


def test_answers_are_linear(rng):
    p = SchemeParams.create(K=2, N=5, T=1, B=2, l=4, alpha=1, q=101)
    X1 = p.field.random(rng, (p.N - p.B, p.width))
    X2 = p.field.random(rng, (p.N - p.B, p.width))
    lhs = generate_answers(p, (X1 + X2) % p.q).values
    rhs = (generate_answers(p, X1).values + generate_answers(p, X2).values) % p.q
    assert np.array_equal(lhs, rhs)


def test_block_matrix_layout():
    p = SchemeParams.create(K=2, N=4, T=1, B=1, l=3, alpha=1, q=11)
    msgs = np.arange(2 * p.message_length).reshape(2, -1) % 11
    W = Dataset(msgs).block_matrix(p)
    # column i stacks symbol j of instance i of message k at row k*m + j
    for k in range(2):
        for i in range(p.width):
            for j in range(p.m):
                assert W[k * p.m + j, i] == msgs[k, i * p.m + j]


# capacity and accounting

def test_capacity_values():
    assert capacity(3, 1, 1, 1) == Fraction(1, 3)
    assert capacity(3, 1, 2, 10) == 0
    assert capacity(4, 1, 1, Fraction(2, 5)) == 0
    assert capacity(4, 1, 1, Fraction(1, 2)) == Fraction(1, 2)


def test_omniscient_capacity():
    assert capacity_omniscient_zero_error(4, 1, 1) == Fraction(1, 4)
    assert capacity_omniscient_zero_error(3, 1, 1) == 0
    assert capacity_omniscient_zero_error(5, 1, 1) == Fraction(2, 5)


@pytest.mark.parametrize("l", [1, 2, 7, 32])
def test_secret_accounting_three_servers(l):
    p = SchemeParams.create(K=2, N=3, T=1, B=1, l=l, alpha=2)
    acc = accounting(p)
    assert acc.rate == Fraction(1, 3)
    assert acc.secret_symbols == 2 * 3


def test_secret_accounting_five_servers():
    acc = accounting(SchemeParams.create(K=2, N=5, T=2, B=1, l=4, alpha=1))
    assert acc.rate == Fraction(2, 5)
    assert acc.rho == 1


def untouched(l):
    return SchemeParams.create(K=2, N=4, T=1, B=1, E=2, l=l, alpha=4, beta=2,
                               model="untouched")


def test_untouched_rate_formula():
    p = untouched(64)
    bits = math.ceil(math.log2(p.q))
    want = Fraction(2 * 64, 4**2 * 2 * 3 * 4 * bits + 4 * 66)
    acc = accounting(p)
    assert acc.rate == want
    assert acc.rho == Fraction(1 * 66, 2 * 64)
    assert acc.phase1_symbols == 4**2 * 2 * 3 * 4 * bits


def test_untouched_rate_approaches_capacity():
    rates = [accounting(untouched(l)).rate for l in (8, 64, 512, 4096, 10**6)]
    assert all(a <= b for a, b in zip(rates, rates[1:]))
    assert rates[-1] > Fraction(49, 100)
    assert rates[-1] < Fraction(1, 2)
