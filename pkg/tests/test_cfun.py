import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaprob.cfun import (OrbitFunction, cf_expectation, cf_expectation_ghost, cf_integrate,
                             cf_integrate_point, cf_pullback, cf_restrict, cf_restrict_total, value_adams)
from lambdaprob.scalars import RATIONAL
from lambdaprob.witt import WittVec, witt_substitute
from lambdaprob.zset import ZMap, ZSet, zmap_base_change, zmap_extend, zmap_identity, zs_class

from randdata import rand_function, rand_witt, rand_zmap, rand_zset

seeds = st.integers(0, 2**32 - 1)
P = 24


def teich(z, prec=P):
    return WittVec.teichmuller(z, prec)


def pulled_to_square(sq, f):
    """phi^* f on the top-left corner of a cartesian square."""
    V1 = sq.M1.total()
    out = {}
    for key in V1.keys():
        image, ratio = sq.phi(key)
        out[key] = value_adams(ratio, f(image))
    return OrbitFunction(V1, out)


def test_pullback_along_identity():
    B = ZSet([("a", 1), ("b", 3)])
    g = OrbitFunction(B, {"a": teich(2), "b": teich(5)})
    pulled = cf_pullback(zmap_identity(B), g)
    assert all(pulled((bk, "pt")) == g(bk) for bk in B.keys())


def test_pullback_to_degree_four_orbit():
    M = ZMap(ZSet.orbit(2, "b"), {"b": ZSet.orbit(2, "f")})
    g = OrbitFunction(M.base, {"b": teich(3)})
    assert cf_pullback(M, g)(("b", "f")) == teich(9, P // 2)


def test_integral_of_one_is_class():
    V = ZSet([("a", 1), ("b", 2), ("c", 4)])
    one = OrbitFunction.constant(V, WittVec.unit(P))
    assert cf_integrate_point(V, one).truncate(P) == zs_class(V, P)


def test_integral_over_single_orbit_substitutes():
    f = rand_witt(random.Random(1), 8)
    V = ZSet.orbit(3, "o")
    assert cf_integrate_point(V, OrbitFunction(V, {"o": f})) == witt_substitute(3, f)


def test_restriction_examples():
    V = ZSet.orbit(2, "o")
    f = OrbitFunction(V, {"o": WittVec([1, 2, 3, 4, 5, 6, 7, 8])})
    assert cf_restrict(f, 1) is f
    r4 = cf_restrict(f, 4)
    assert sorted(r4.domain.keys()) == [("o", 0), ("o", 1)]
    assert all(r4(k) == value_adams(2, f("o")) for k in r4.domain.keys())
    r2 = cf_restrict(f, 2)
    assert all(r2(k) == f("o") for k in r2.domain.keys())


def test_expectation_examples():
    V = ZSet([("a", 1), ("b", 1)])
    M = ZMap(ZSet.point(), {"pt": V})
    one = OrbitFunction.constant(M.total(), WittVec.unit(P))
    assert cf_expectation(M, one)("pt") == WittVec.unit(P)
    f = OrbitFunction(M.total(), {("pt", "a"): teich(2), ("pt", "b"): teich(4)})
    assert cf_expectation(M, f)("pt").ghost[0] == RATIONAL(3)
    assert cf_expectation_ghost(V, OrbitFunction(V, {"a": teich(2), "b": teich(4)}), 1) == RATIONAL(3)


def test_ghost_expectation_by_census():
    V = ZSet([("a", 1), ("b", 2)])
    f = OrbitFunction(V, {"a": teich(1), "b": teich(2)})
    # V(2) has three points: the rational one (value 1) and the two conjugates (value 2 each).
    assert cf_expectation_ghost(V, f, 2) == RATIONAL(Fraction(5, 3))
    c = OrbitFunction.constant(V, teich(5))
    assert cf_expectation_ghost(V, c, 3) == RATIONAL(125)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_integration_is_linear_and_pullback_multiplicative(seed):
    rng = random.Random(seed)
    M = rand_zmap(rng)
    V = M.total()
    f, g = rand_function(rng, V, lambda: rand_witt(rng, P)), rand_function(rng, V, lambda: rand_witt(rng, P))
    lhs = cf_integrate(M, f + g)
    a, b = cf_integrate(M, f), cf_integrate(M, g)
    assert all(lhs(k).agrees(a(k) + b(k)) for k in M.base.keys())
    u, v = (rand_function(rng, M.base, lambda: rand_witt(rng, P)) for _ in range(2))
    assert cf_pullback(M, u * v) == cf_pullback(M, u) * cf_pullback(M, v)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_ghost_expectation_matches_expectation(seed):
    rng = random.Random(seed)
    V = ZSet([("s", 1), *rand_zset(rng, 4, 4).orbits])
    f = rand_function(rng, V, lambda: rand_witt(rng, P))
    M = ZMap(ZSet.point(), {"pt": V})
    E = cf_expectation(M, OrbitFunction(M.total(), {("pt", k): f(k) for k in V.keys()}))("pt")
    for k in range(1, 7):
        assert cf_expectation_ghost(V, f, k) == E.ghost[k - 1]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_base_change_and_expectation_pullback(seed):
    rng = random.Random(seed)
    M2 = rand_zmap(rng, section=True)
    psi = ZMap(M2.base, {bk: rand_zset(rng, 2, 3, prefix="g") for bk in M2.base.keys()})
    sq = zmap_base_change(M2, psi)
    f = rand_function(rng, M2.total(), lambda: rand_witt(rng, P))
    phif = pulled_to_square(sq, f)
    lhs, rhs = cf_pullback(psi, cf_integrate(M2, f)), cf_integrate(sq.M1, phif)
    assert all(lhs(k).agrees(rhs(k)) for k in sq.M1.base.keys())
    lhs, rhs = cf_pullback(psi, cf_expectation(M2, f)), cf_expectation(sq.M1, phif)
    assert all(lhs(k).agrees(rhs(k)) for k in sq.M1.base.keys())


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4))
def test_expectation_commutes_with_extension(seed, k):
    rng = random.Random(seed)
    M = rand_zmap(rng, section=True)
    f = rand_function(rng, M.total(), lambda: rand_witt(rng, P))
    lhs = cf_restrict(cf_expectation(M, f), k)
    rhs = cf_expectation(zmap_extend(M, k), cf_restrict_total(M, f, k))
    assert all(lhs(b).agrees(rhs(b)) for b in lhs.domain.keys())
