from collections import Counter
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, strategies as st

from coopmsr.pairmap import build, sub_packetization_exponent

TABLE_N7_R3 = {
    (1, 2): 1, (1, 3): 1, (2, 3): 1,
    (4, 5): 2, (4, 6): 2, (5, 6): 2,
    (1, 4): 3, (1, 5): 6, (1, 6): 9, (1, 7): 12, (4, 7): 15,
    (2, 4): 4, (2, 5): 7, (2, 6): 10, (2, 7): 13, (5, 7): 16,
    (3, 4): 5, (3, 5): 8, (3, 6): 11, (3, 7): 14, (6, 7): 17,
}


def test_table_reproduced():
    pm = build(7, 3)
    assert pm.m == 17
    assert dict(pm.pi) == TABLE_N7_R3


def test_omega_examples():
    pm = build(7, 3)
    assert pm.omega(2) == ({4, 7, 10, 13}, set())
    assert pm.omega(7) == (set(), {12, 13, 14, 15, 16, 17})
    assert pm.omega(4) == ({15}, {3, 4, 5})


def test_small_r2_map():
    pm = build(4, 2)
    assert (pm.m, pm.g) == (6, 2)
    assert pm.pi[(1, 2)] == 1 and pm.pi[(3, 4)] == 2
    cross = {pair: pm.pi[pair] for pair in [(1, 3), (2, 3), (1, 4), (2, 4)]}
    assert cross == {(1, 3): 3, (2, 3): 4, (1, 4): 5, (2, 4): 6}


def test_classify():
    pm = build(7, 3)
    assert pm.classify(4, 5) == ("intra", 2)
    assert pm.classify(2, 7) == ("cross", 13)
    with pytest.raises(ValueError):
        pm.classify(7, 2)


def test_build_rejects():
    with pytest.raises(ValueError):
        build(3, 3)
    with pytest.raises(ValueError):
        build(5, 1)


@pytest.mark.parametrize("n,k,m", [(4, 2, 6), (5, 3, 10), (6, 4, 15), (5, 2, 8), (6, 3, 11), (7, 4, 17)])
def test_exponent(n, k, m):
    assert sub_packetization_exponent(n, n - k) == m == build(n, n - k).m


@given(st.integers(2, 6).flatmap(lambda r: st.tuples(st.just(r), st.integers(r + 1, 13))))
def test_pairmap_invariants(rn):
    r, n = rn
    pm = build(n, r)
    g = n // r
    assert pm.m == comb(n, 2) - g * (comb(r, 2) - 1)
    for i in range(1, g + 1):
        block = range((i - 1) * r + 1, i * r + 1)
        for pair in combinations(block, 2):
            assert pm.pi[pair] == i
    cross = [pair for pair in combinations(range(1, n + 1), 2) if pm.pi[pair] > g]
    assert sorted(pm.pi[p] for p in cross) == list(range(g + 1, pm.m + 1))
    zero = Counter()
    one = Counter()
    for j in range(1, n + 1):
        o0, o1 = pm.omega(j)
        zero.update(o0)
        one.update(o1)
    assert set(zero) == set(one) == set(range(g + 1, pm.m + 1))
    assert set(zero.values()) <= {1} and set(one.values()) <= {1}
    for (j, jp) in cross:
        rho = pm.pi[(j, jp)]
        assert rho in pm.omega(j)[0] and rho in pm.omega(jp)[1]
        assert pm.pair_of_digit(rho) == (j, jp)
