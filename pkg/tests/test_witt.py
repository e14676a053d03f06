from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaprob.scalars import RATIONAL
from lambdaprob.witt import (PrecisionError, WittVec, witt_adams, witt_from_series, witt_ring, witt_substitute,
                             witt_to_series)

fractions = st.fractions(min_value=-6, max_value=6, max_denominator=5)
ghosts = st.lists(fractions, min_size=6, max_size=6)


def g(*xs):
    return tuple(RATIONAL(x) for x in xs)


def expand_product(roots, K):
    """Coefficients c_1..c_K of prod 1/(1 - a t), by multiplying geometric series."""
    series = [Fraction(1)] + [Fraction(0)] * K
    for a in roots:
        geo = [Fraction(a) ** j for j in range(K + 1)]
        series = [sum(series[i] * geo[n - i] for i in range(n + 1)) for n in range(K + 1)]
    return series[1:]


def test_geometric_series_is_unit():
    assert witt_from_series([1] * 5).ghost == g(1, 1, 1, 1, 1)


def test_teichmuller_three():
    assert witt_from_series([3, 9, 27, 81]).ghost == g(3, 9, 27, 81)
    assert WittVec.teichmuller(3, 4) == witt_from_series([3, 9, 27, 81])


def test_two_factor_product_matches_power_sums():
    c = expand_product([1, 2], 4)
    assert c == [3, 7, 15, 31]
    assert witt_from_series(c).ghost == g(3, 5, 9, 17)


def test_teichmuller_product():
    assert WittVec.teichmuller(2, 3) * WittVec.teichmuller(3, 3) == WittVec.teichmuller(6, 3)
    assert (WittVec.teichmuller(2, 3) * WittVec.teichmuller(3, 3)).ghost == g(6, 36, 216)


def test_negated_unit_series():
    assert witt_to_series(-WittVec.unit(5)) == list(g(-1, 0, 0, 0, 0))


def test_adams_examples():
    w = WittVec([1, 2, 3, 4])
    assert witt_adams(2, w).ghost == g(2, 4)
    assert witt_adams(1, w) is w
    assert witt_adams(2, WittVec.teichmuller(3, 4)) == WittVec.teichmuller(9, 2)
    with pytest.raises(PrecisionError):
        witt_adams(5, w)


def test_substitution_examples():
    assert witt_substitute(2, WittVec.unit(3)).ghost == g(0, 2, 0, 2, 0, 2)
    w = WittVec.teichmuller(3, 2)
    assert witt_substitute(1, w) is w
    assert witt_substitute(2, w).ghost == g(0, 6, 0, 18)


def test_substitution_matches_series_in_t_squared():
    w = WittVec([2, -1, 5])
    c = witt_to_series(w)
    spread = []
    for x in c:
        spread += [RATIONAL(0), x]
    assert witt_from_series(spread) == witt_substitute(2, w)


def test_truncation_guard():
    with pytest.raises(PrecisionError):
        WittVec.unit(3).truncate(4)


def test_ring_dispatch():
    a, b = WittVec([1, 2]), WittVec([3, 4])
    assert witt_ring(a, b, "add").ghost == g(4, 6)
    assert witt_ring(a, b, "mul").ghost == g(3, 8)
    assert witt_ring(a, None, "neg").ghost == g(-1, -2)
    assert witt_ring(b, None, "inv").ghost == g(Fraction(1, 3), Fraction(1, 4))
    with pytest.raises(ValueError):
        witt_ring(a, b, "pow")


@settings(max_examples=80, deadline=None)
@given(ghosts)
def test_series_codec_round_trip(xs):
    w = WittVec(xs)
    assert witt_from_series(witt_to_series(w)) == w


@settings(max_examples=80, deadline=None)
@given(ghosts, ghosts)
def test_addition_is_series_multiplication(xs, ys):
    a, b = WittVec(xs), WittVec(ys)
    ca, cb = [RATIONAL(1)] + witt_to_series(a), [RATIONAL(1)] + witt_to_series(b)
    prod = [sum((ca[i] * cb[n - i] for i in range(n + 1)), RATIONAL(0)) for n in range(1, 7)]
    assert witt_from_series(prod) == a + b
    assert (a + (-a)).is_zero()


@settings(max_examples=60, deadline=None)
@given(ghosts, st.integers(1, 3), st.integers(1, 3))
def test_adams_operations_compose_and_are_ring_maps(xs, i, j):
    w = WittVec(xs)
    if i * j <= 6:
        assert witt_adams(i, witt_adams(j, w)) == witt_adams(i * j, w)
    v = WittVec(list(reversed(xs)))
    assert witt_adams(i, w * v) == witt_adams(i, w) * witt_adams(i, v)
    assert witt_adams(i, witt_substitute(i, w)).ghost == tuple(x * i for x in w.ghost)
