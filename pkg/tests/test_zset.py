from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaprob.scalars import RATIONAL
from lambdaprob.witt import WittVec, witt_from_series
from lambdaprob.zset import (ZMap, ZSet, zmap_extend, zmap_fiber, zmap_identity, zmap_projection, zs_class,
                             zs_extend, zs_product, zs_projective_space)

orbit_lists = st.lists(st.integers(1, 6), min_size=0, max_size=5)


def zset(degrees, prefix="v"):
    return ZSet([(f"{prefix}{i}", d) for i, d in enumerate(degrees)])


def peel_orbit_counts(fixed, D):
    """Orbit counts from fixed-point counts by subtracting smaller divisors first."""
    a = {}
    for d in range(1, D + 1):
        a[d] = (fixed(d) - sum(e * a[e] for e in range(1, d) if d % e == 0)) // d
    return [a[d] for d in range(1, D + 1)]


def test_single_degree_two_orbit():
    assert zs_class(ZSet.orbit(2), 6).ghost == tuple(RATIONAL(x) for x in (0, 2, 0, 2, 0, 2))
    assert zs_class(ZSet.orbit(2), 6) == witt_from_series([0, 1, 0, 1, 0, 1])


def test_point_class_is_unit():
    assert zs_class(ZSet.point(), 4) == WittVec.unit(4)


def test_projective_line_over_f2():
    P1 = zs_projective_space(2, 1, 6)
    assert [P1.count(d) for d in range(1, 5)] == [3, 1, 2, 3]
    assert [P1.count(d) for d in range(1, 7)] == peel_orbit_counts(lambda k: 2**k + 1, 6)
    assert zs_class(P1, 4).ghost == tuple(RATIONAL(x) for x in (3, 5, 9, 17))


def test_projective_counts_other_cases():
    pt = zs_projective_space(2, 0, 4)
    assert [pt.count(d) for d in range(1, 5)] == [1, 0, 0, 0]
    P1 = zs_projective_space(3, 1, 4)
    assert P1.count(1) == 4 and P1.count(2) == 3
    P2 = zs_projective_space(3, 2, 5)
    assert [P2.count(d) for d in range(1, 6)] == peel_orbit_counts(lambda k: 3 ** (2 * k) + 3**k + 1, 5)


def test_extension_examples():
    V6 = zs_extend(ZSet.orbit(6), 4)
    assert sorted(d for _, d in V6.orbits) == [3, 3]
    V = ZSet.orbit(3)
    assert zs_extend(V, 1) is V
    P1_4 = zs_extend(zs_projective_space(2, 1, 8), 2)
    assert P1_4.count(1) == 5
    assert [P1_4.count(d) for d in range(1, 4)] == [c for _, c in zs_projective_space(4, 1, 3).counts()]


def test_maps_and_fibers():
    B = ZSet([("b", 1), ("c", 2)])
    ident = zmap_identity(B)
    assert all(zmap_fiber(ident, b).orbits == (("pt", 1),) for b in B.keys())
    V = ZSet([("x", 1), ("y", 2)])
    proj = zmap_projection(V, ZSet.orbit(1, "k"))
    assert zs_class(zmap_fiber(proj, "k"), 4) == zs_class(V, 4)
    M = ZMap(ZSet.orbit(2, "b"), {"b": ZSet.orbit(3, "f")})
    assert M.total().orbits == ((("b", "f"), 6),)
    assert M.has_section()


@settings(max_examples=60, deadline=None)
@given(orbit_lists, st.integers(1, 5), st.integers(1, 4))
def test_extension_scales_fixed_points(degrees, k, j):
    V = zset(degrees)
    assert zs_extend(V, k).fixed_points(j) == V.fixed_points(k * j)


@settings(max_examples=60, deadline=None)
@given(orbit_lists, orbit_lists)
def test_product_class_is_class_product(a, b):
    V, W = zset(a), zset(b, "w")
    assert zs_class(zs_product(V, W), 6) == zs_class(V, 6) * zs_class(W, 6)


@settings(max_examples=40, deadline=None)
@given(st.lists(orbit_lists, min_size=1, max_size=3), st.lists(st.integers(1, 3), min_size=3, max_size=3),
       st.integers(2, 4))
def test_map_extension_preserves_total_fixed_points(fibers, base_degrees, k):
    B = zset(base_degrees[: len(fibers)], "b")
    M = ZMap(B, {bk: zset(f, "f") for bk, f in zip(B.keys(), fibers)})
    Mk = zmap_extend(M, k)
    for j in range(1, 4):
        assert Mk.total().fixed_points(j) == M.total().fixed_points(k * j)
