import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coopmsr.msrcode import (
    BeyondMDSRadius,
    coeff_chi,
    coeff_f,
    encode,
    erasure_decode,
    make_params,
    parity_row,
    random_codeword,
    row_structure,
    syndrome,
    verify_mds,
)
from coopmsr.msrcode.solver import build_plan

from oracles import dense_parity_matrix, rank_mod_p

SMALL = [(4, 2), (3, 1), (4, 1)]


def lazy_dense(params):
    H = np.zeros((params.r * params.ell, params.n * params.ell), dtype=np.int64)
    for t in range(1, params.r + 1):
        for a in range(params.ell):
            for j, b, c in parity_row(params, t, a):
                H[(t - 1) * params.ell + a, (j - 1) * params.ell + b] = int(c)
    return H


def test_make_params_examples():
    p = make_params(7, 4)
    assert (p.r, p.m, p.ell) == (3, 17, 3**17)
    assert make_params(4, 2).ell == 64
    assert make_params(5, 2).ell == 6561
    assert p.lambdas == tuple(range(1, 8)) and p.gammas == (8,) and p.tau == 65536


@pytest.mark.parametrize("kw", [
    dict(n=4, k=4), dict(n=4, k=3), dict(n=4, k=2, p=3), dict(n=4, k=2, p=15),
    dict(n=4, k=2, lambdas=[1, 1, 2, 3]), dict(n=5, k=2, gammas=[1]), dict(n=4, k=2, tau=1),
    dict(n=4, k=2, p=16777259),
])
def test_make_params_rejects(kw):
    with pytest.raises(ValueError):
        make_params(**kw)


def test_ell_guard():
    with pytest.raises(OverflowError):
        make_params(12, 6)


def test_coeff_f():
    p = make_params(7, 4)
    assert int(coeff_f(p, 0, 2)) == 1
    assert int(coeff_f(p, 2, 0)) == p.tau
    with pytest.raises(ValueError):
        coeff_f(p, 1, 1)


def test_coeff_chi():
    p = make_params(7, 4)
    sp = p.space
    base = [2] * 17
    a = sp.compress(base[:3] + [0] + base[4:])
    assert coeff_chi(p, a, 4, 2) == 1
    assert coeff_chi(p, sp.compress(base), 4, 2) == 0
    b = sp.compress(base[:12] + [1] + base[13:])
    assert coeff_chi(p, b, 13, 7) == 1


@pytest.mark.parametrize("n,k", SMALL)
def test_lazy_rows_equal_dense_oracle(n, k):
    params = make_params(n, k)
    assert params.ell <= 81
    assert np.array_equal(lazy_dense(params), dense_parity_matrix(params))


@pytest.mark.parametrize("n,k", SMALL + [(5, 2), (6, 3)])
def test_row_weight_formula(n, k):
    params = make_params(n, k)
    rows = np.arange(min(params.ell, 6561))
    ent = row_structure(params, rows)
    r, pm = params.r, params.pairmap
    for j in range(1, n + 1):
        om0, om1 = pm.omega(j)
        grp = pm.group_of(j)
        expect = np.ones(rows.size, dtype=np.int64)
        if grp:
            expect += (r - 1) * (params.space.digits_of(rows, grp[0]) == grp[1])
        for rho in om0:
            expect += (r - 2) * (params.space.digits_of(rows, rho) == 0)
        for rho in om1:
            expect += (r - 2) * (params.space.digits_of(rows, rho) == 1)
        got = np.bincount(ent.row[ent.node == j], minlength=rows.size)
        assert np.array_equal(got, expect)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (5, 2), (6, 4)])
def test_generation_rules_never_collide(n, k):
    params = make_params(n, k)
    rows = np.arange(min(params.ell, 6561))
    ent = row_structure(params, rows)
    key = (ent.row * (params.n + 1) + ent.node) * params.ell + ent.col
    assert np.unique(key).size == key.size


def test_example_rules_spot_check():
    params = make_params(7, 4)
    sp, p = params.space, params.p
    rng = np.random.default_rng(7)
    lam, gam, tau = params.lambdas, params.gammas, params.tau
    for _ in range(1000):
        t = int(rng.integers(1, 4))
        d = rng.integers(0, 3, 17).tolist()
        a = sp.compress(d)
        row = {(j, b): int(c) for j, b, c in parity_row(params, t, a) if j == 2}
        expect = {(2, a): pow(lam[1], t - 1, p)}
        if d[0] == 1:
            expect[(2, sp.substitute(a, 1, 0))] = tau * pow(lam[0], t - 1, p) % p
            expect[(2, sp.substitute(a, 1, 2))] = pow(lam[2], t - 1, p)
        for rho in (4, 7, 10, 13):
            if d[rho - 1] == 0:
                expect[(2, sp.substitute(a, rho, 2))] = pow(gam[0], t - 1, p)
        assert row == expect


def test_r2_has_no_gamma_entries():
    params = make_params(5, 3)
    ent = row_structure(params, np.arange(params.ell))
    assert not np.any(ent.pid >= params.n)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (5, 2)])
def test_encode_round_trip(n, k):
    params = make_params(n, k)
    rng = np.random.default_rng(n * 10 + k)
    data = params.field.random((k, params.ell, 100 if params.ell < 5000 else 20), rng)
    c = encode(params, data)
    assert np.array_equal(c[:k], data)
    assert not syndrome(params, c).any()
    for erased in itertools.combinations(range(1, n + 1), params.r):
        punctured = c.copy()
        punctured[[j - 1 for j in erased]] = 0
        assert np.array_equal(erasure_decode(params, punctured, erased), c)


def test_zero_data_encodes_to_zero():
    params = make_params(4, 2)
    assert not encode(params, np.zeros((2, 64), dtype=np.int64)).any()


def test_decode_edge_cases():
    params = make_params(4, 2)
    c = random_codeword(params, np.random.default_rng(1))
    assert np.array_equal(erasure_decode(params, c, []), c)
    for j in range(1, 5):
        broken = c.copy()
        broken[j - 1] = 0
        assert np.array_equal(erasure_decode(params, broken, [j]), c)
    with pytest.raises(BeyondMDSRadius):
        erasure_decode(params, c, [1, 2, 3])
    with pytest.raises(ValueError):
        syndrome(params, c[:, :10])


def test_single_flip_detected():
    params = make_params(5, 3)
    c = random_codeword(params, np.random.default_rng(3))
    for j, b in [(1, 0), (3, 511), (5, 1023)]:
        bad = c.copy()
        bad[j - 1, b] = (bad[j - 1, b] + 1) % params.p
        assert syndrome(params, bad).any()


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (5, 2)])
def test_verify_mds(n, k):
    v = verify_mds(make_params(n, k))
    assert v.ok and v.subsets_checked == v.subsets_total


def test_verify_mds_agrees_with_dense_rank():
    params = make_params(4, 2)
    H = dense_parity_matrix(params)
    for subset in itertools.combinations(range(1, 5), 2):
        cols = [(j - 1) * 64 + b for j in subset for b in range(64)]
        assert rank_mod_p(H[:, cols], params.p) == 128
        assert build_plan(params, subset).invertible


def degenerate(params, lambdas):
    # skips make_params validation on purpose
    pts = tuple(lambdas) + params.gammas
    powers = np.array([[pow(x, t, params.p) for x in pts] for t in range(params.r)], dtype=np.int64)
    return dataclasses.replace(params, lambdas=tuple(lambdas), powers=powers)


def test_non_mds_choice_is_detected():
    params = degenerate(make_params(4, 2), [1, 1, 3, 4])
    verdict = verify_mds(params)
    assert not verdict.ok
    H = dense_parity_matrix(params)
    cols = [(j - 1) * 64 + b for j in verdict.failing_subset for b in range(64)]
    assert rank_mod_p(H[:, cols], params.p) < 128


def test_verify_mds_guard():
    with pytest.raises(ValueError, match="guard"):
        verify_mds(make_params(6, 3))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(4, 2), (5, 3), (3, 1)]), st.integers(0, 2**32 - 1), st.data())
def test_linearity_and_decode_property(nk, seed, data):
    params = make_params(*nk)
    rng = np.random.default_rng(seed)
    x, y = random_codeword(params, rng), random_codeword(params, rng)
    s = int(rng.integers(0, params.p))
    z = (x + s * y) % params.p
    assert not syndrome(params, z).any()
    erased = data.draw(st.sets(st.integers(1, params.n), max_size=params.r))
    punctured = z.copy()
    punctured[[j - 1 for j in erased]] = 0
    assert np.array_equal(erasure_decode(params, punctured, erased), z)
