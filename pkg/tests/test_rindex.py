import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coopmsr.rindex import IndexSpace


def digits(a, r, m):
    return tuple((a // r**i) % r for i in range(m))


def test_expand_examples():
    sp = IndexSpace(3, 2, 1)
    assert sp.expand(5) == (2, 1)
    assert sp.expand(0) == (0, 0)
    big = IndexSpace(3, 17, 2)
    assert big.expand(3**17 - 1) == (2,) * 17


def test_expand_out_of_range():
    with pytest.raises(ValueError):
        IndexSpace(3, 2, 1).expand(9)


def test_substitute_examples():
    sp = IndexSpace(3, 2, 1)
    assert sp.substitute(5, 1, 0) == 3
    assert sp.substitute(5, 2, 0) == 2
    assert sp.substitute(5, 1, 2) == 5


def test_axis_set_examples():
    sp = IndexSpace(2, 2, 1)
    assert list(sp.axis_set(1, 0)) == [0, 2]
    assert list(sp.axis_set(2, 1)) == [2, 3]


def test_suffix_weight_examples():
    sp = IndexSpace(3, 4, 2)
    assert sp.suffix_weight(sp.compress((2, 2, 0, 1))) == 2
    assert sp.suffix_weight(sp.compress((2, 2, 2, 2))) == 0
    r2 = IndexSpace(2, 5, 2)
    assert all(r2.suffix_weight(a) == 3 for a in range(r2.ell))


def test_match_count_examples():
    sp = IndexSpace(3, 2, 1)
    a = sp.compress((2, 1))
    assert sp.match_count(a, []) == 0
    assert sp.match_count(a, [(1, 2)]) == 1
    assert sp.match_count(a, [(1, 0), (2, 1)]) == 1


def test_overflow_guard():
    with pytest.raises(OverflowError):
        IndexSpace(3, 30, 1)


@pytest.mark.parametrize("r,m,g", [(2, 6, 2), (3, 4, 1), (3, 8, 1), (4, 5, 1)])
def test_exhaustive_against_digit_oracle(r, m, g):
    sp = IndexSpace(r, m, g)
    everything = np.arange(sp.ell)
    for a in range(sp.ell):
        assert sp.expand(a) == digits(a, r, m)
        assert sp.compress(sp.expand(a)) == a
    for u, v in itertools.product(range(1, m + 1), range(r)):
        ref = [a for a in range(sp.ell) if digits(a, r, m)[u - 1] == v]
        assert list(sp.axis_set(u, v)) == ref
        assert sp.axis_array(u, v).tolist() == ref
        assert len(ref) == sp.ell // r
    shells = [set(sp.shell(s)) for s in range(m - g + 1)]
    assert sum(len(s) for s in shells) == sp.ell
    assert set().union(*shells) == set(range(sp.ell))
    w = sp.suffix_weights(everything)
    ref_w = [sum(d in (0, 1) for d in digits(a, r, m)[g:]) for a in range(sp.ell)]
    assert w.tolist() == ref_w


spaces = st.sampled_from([IndexSpace(2, 6, 2), IndexSpace(3, 8, 1), IndexSpace(3, 17, 2), IndexSpace(5, 7, 1)])


@given(spaces, st.data())
def test_substitution_properties(sp, data):
    a = data.draw(st.integers(0, sp.ell - 1))
    i = data.draw(st.integers(1, sp.m))
    v = data.draw(st.integers(0, sp.r - 1))
    b = sp.substitute(a, i, v)
    assert sp.digit(b, i) == v
    assert sp.substitute(a, i, sp.digit(a, i)) == a
    assert sp.substitute(b, i, sp.digit(a, i)) == a
    assert all(sp.digit(a, q) == sp.digit(b, q) for q in range(1, sp.m + 1) if q != i)
    arr = sp.substitute_array(np.array([a]), i, v)
    assert int(arr[0]) == b


@given(spaces, st.data())
def test_axis_sets_partition(sp, data):
    u = data.draw(st.integers(1, sp.m))
    a = data.draw(st.integers(0, sp.ell - 1))
    hits = [v for v in range(sp.r) if sp.digit(a, u) == v]
    assert len(hits) == 1
