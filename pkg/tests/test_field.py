import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from byzspir.errors import ConfigError, DuplicatePoint, Singular
from byzspir.field import Field, invert, poly_eval, poly_from_roots, smallest_prime_at_least, \
    solve, vandermonde


def sympy_inverse(m, q):
    return np.array(sympy.Matrix(m.tolist()).inv_mod(q).tolist(), dtype=np.int64)


def test_modulus_must_be_prime():
    with pytest.raises(ConfigError):
        Field(1024)
    assert Field(1031).q == 1031


def test_smallest_prime_at_least():
    assert smallest_prime_at_least(32 * 32) == 1031
    assert smallest_prime_at_least(64 * 64) == 4099
    assert smallest_prime_at_least(7) == 7


def test_vandermonde_small():
    f = Field(7)
    assert vandermonde(f, (1, 2, 3), 2).tolist() == [[1, 1], [1, 2], [1, 3]]
    assert vandermonde(f, (5,), 1).tolist() == [[1]]


def test_vandermonde_with_zero_point():
    # entry (i, j) = point_i ** j, computed directly
    f = Field(5)
    pts = (1, 2, 0)
    want = [[pow(x, j, 5) if (x, j) != (0, 0) else 1 for j in range(2)] for x in pts]
    assert vandermonde(f, pts, 2).tolist() == want == [[1, 1], [1, 2], [1, 0]]


def test_vandermonde_rejects_duplicates():
    with pytest.raises(DuplicatePoint):
        vandermonde(Field(7), (1, 8), 2)


def test_invert_identity():
    f = Field(7)
    assert np.array_equal(invert(f, f.identity(3)), f.identity(3))


def test_invert_two_by_two():
    f = Field(5)
    m = np.array([[1, 1], [1, 2]])
    inv = invert(f, m)
    assert np.array_equal(f.matmul(inv, m), f.identity(2))
    assert np.array_equal(inv, sympy_inverse(m, 5))


def test_invert_singular():
    with pytest.raises(Singular):
        invert(Field(5), np.array([[1, 1], [2, 2]]))


def test_solve_identity_and_round_trip(rng):
    f = Field(101)
    b = f.random(rng, (3, 4))
    assert np.array_equal(solve(f, f.identity(3), b), b)
    for _ in range(20):
        a = f.random(rng, (4, 4))
        if sympy.Matrix(a.tolist()).det() % 101 == 0:
            continue
        x = f.random(rng, (4, 3))
        assert np.array_equal(solve(f, a, f.matmul(a, x)), x)


def test_solve_singular():
    with pytest.raises(Singular):
        solve(Field(101), np.array([[1, 2], [2, 4]]), np.array([[1], [1]]))


def test_scalar_inverse_and_powers(rng):
    f = Field(1031)
    xs = rng.integers(1, 1031, size=1000)
    for x in xs:
        assert int(x) * f.inv(x) % 1031 == 1
        e = int(rng.integers(0, 12))
        acc = 1
        for _ in range(e):
            acc = acc * int(x) % 1031
        assert f.pow(x, e) == acc


@pytest.mark.parametrize("q", [7, 11])
def test_square_vandermonde_invertible_exhaustive(q):
    from itertools import combinations
    f = Field(q)
    for size in range(1, 7):
        for pts in combinations(range(q), size):
            v = vandermonde(f, pts, size)
            assert np.array_equal(f.matmul(invert(f, v), v), f.identity(size))


def test_square_vandermonde_invertible_q101(rng):
    f = Field(101)
    for _ in range(200):
        size = int(rng.integers(1, 7))
        pts = rng.choice(101, size=size, replace=False)
        v = vandermonde(f, pts, size)
        assert np.array_equal(f.matmul(invert(f, v), v), f.identity(size))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_invert_property(n, seed):
    f = Field(31)
    m = f.random(np.random.default_rng(seed), (n, n))
    invertible = sympy.Matrix(m.tolist()).det() % 31 != 0
    if not invertible:
        with pytest.raises(Singular):
            invert(f, m)
        return
    inv = invert(f, m)
    assert np.array_equal(f.matmul(inv, m), f.identity(n))
    b = f.random(np.random.default_rng(seed + 1), (n, 2))
    assert np.array_equal(f.matmul(m, solve(f, m, b)), b)


def test_large_modulus_uses_python_ints(rng):
    q = 2**61 - 1
    f = Field(q)
    assert f.dtype is object
    m = f.array([[3, 5], [7, 2**60]])
    inv = invert(f, m)
    assert (f.matmul(inv, m) == f.identity(2)).all()
    want = sympy.Matrix(m.tolist()).inv_mod(q)
    assert inv.tolist() == want.tolist()


def test_poly_from_roots_vanishes():
    f = Field(101)
    poly = poly_from_roots(f, [3, 17, 55])
    assert len(poly) == 4 and poly[-1] == 1
    for r in (3, 17, 55):
        assert poly_eval(f, poly, r) == 0
    assert poly_eval(f, poly, 4) != 0
