import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coopmsr import gf
from coopmsr.gf import Field, SingularMatrixError, make_field, solve_dense, vandermonde

F11 = make_field(11)


def brute_inverse(x, p):
    return next(y for y in range(1, p) if x * y % p == 1)


def test_make_field_accepts_primes():
    assert make_field(11).p == 11
    assert make_field(65537).p == 65537


@pytest.mark.parametrize("p", [15, 1, 0, 4, 65535])
def test_make_field_rejects_composites(p):
    with pytest.raises(ValueError, match="not prime|too small"):
        make_field(p)


def test_small_arithmetic():
    assert int(gf.add(F11(7), F11(8))) == 4
    assert int(gf.mul(F11(7), F11(8))) == 1
    assert int(gf.inv(F11(1))) == 1
    assert int(gf.inv(F11(7))) == 8
    assert int(gf.power(F11(2), 3)) == 8
    assert int(gf.power(F11(5), 0)) == 1
    assert int(gf.power(F11(0), 0)) == 1


def test_pow_matches_repeated_multiplication():
    acc = F11(1)
    for _ in range(10):
        acc = acc * F11(7)
    assert int(acc) == 1 == int(F11(7) ** 10)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError, match="division by zero"):
        gf.inv(F11(0))


def test_mixed_moduli_rejected():
    with pytest.raises(ValueError, match="mixed moduli"):
        F11(3) + make_field(13)(3)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101, 257])
def test_inverses_exhaustive(p):
    F = Field(p)
    for x in range(1, p):
        assert F.inv_int(x) == brute_inverse(x, p)


def test_solve_small_system():
    x = solve_dense([[1, 1], [1, 3]], [5, 7], F11)
    assert x.tolist() == [4, 1]


def test_solve_identity_returns_rhs():
    b = np.array([3, 0, 10, 6])
    assert solve_dense(np.eye(4, dtype=np.int64), b, F11).tolist() == b.tolist()


def test_solve_singular_reports_rank():
    with pytest.raises(SingularMatrixError) as info:
        solve_dense([[1, 2], [2, 4]], [1, 2], F11)
    assert info.value.rank == 1


def test_solve_size_guard():
    with pytest.raises(ValueError):
        solve_dense(np.eye(5, dtype=np.int64), np.zeros(5), F11, max_size=4)


def test_vandermonde_homogeneous():
    F = Field(65537)
    V = vandermonde([1, 2, 3, 9, 40], F)
    assert not solve_dense(V, np.zeros(5, dtype=np.int64), F).any()


residue = st.integers(min_value=0, max_value=65536)
P = Field(65537)


@given(residue, residue, residue)
def test_field_axioms(a, b, c):
    x, y, z = P(a), P(b), P(c)
    assert x + y == y + x
    assert x * (y + z) == x * y + x * z
    assert (x - y) + y == x
    assert -x + x == P.zero


@given(st.integers(min_value=1, max_value=65536))
def test_inverse_property(a):
    assert int(P(a) * P(a).inverse()) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
def test_random_systems_round_trip(q, seed):
    rng = np.random.default_rng(seed)
    A = P.random((q, q), rng)
    x = P.random(q, rng)
    b = A @ x % P.p
    if P.rank(A) < q:
        with pytest.raises(SingularMatrixError):
            solve_dense(A, b, P)
    else:
        assert np.array_equal(solve_dense(A, b, P), x)
