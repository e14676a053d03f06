import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaprob.cfun import OrbitFunction, value_adams
from lambdaprob.mep import (FamilySpec, character_fraction_check, character_germ_census, ci_lfunction_via_transform,
                            ci_mu, ci_success_parameter, hirzebruch_case_counts, linear_independence_probability,
                            mep_binomial, mep_family, mep_family_ci_lfunction, mep_family_ci_zeta,
                            mep_ghost_classical, mep_product, mep_reduce_mod_qhalf, reference_series)
from lambdaprob.scalars import RATIONAL, tower
from lambdaprob.symfun import (SymFunc, SymSeries, graded_precision, sf_exp_sigma, sf_from_basis, sf_ghost_slice,
                               sf_log_sigma, sf_power, sf_substitute_coefficients, sf_to_basis)
from lambdaprob.witt import WittVec
from lambdaprob.zset import ZMap, ZSet, zs_class

from randdata import rand_series, rand_zset

seeds = st.integers(0, 2**32 - 1)


def m1_ghost(F, k=1):
    return sf_to_basis(F, "m")[(1,)].ghost[k - 1]


# -- brute-force jet censuses ----------------------------------------------------------


def rank_mod_p(rows, p):
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col] * inv
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def smooth_jet_census(p, dim):
    """(vanishing smooth jets, smooth jets) over first-order jets (value, gradient) in dimension dim."""
    fav = tot = 0
    for value, *grad in itertools.product(range(p), repeat=dim + 1):
        if value == 0 and not any(grad):
            continue
        tot += 1
        fav += value == 0
    return fav, tot


def ci_jet_census(p, dim, r):
    """(transverse common zeros, admissible) over r-tuples of first-order jets."""
    jets = list(itertools.product(range(p), repeat=dim + 1))
    fav = tot = 0
    for tup in itertools.product(jets, repeat=r):
        on_locus = all(j[0] == 0 for j in tup)
        # the point lies on the intersection: it must be transverse there
        if on_locus and rank_mod_p([j[1:] for j in tup], p) < r:
            continue
        tot += 1
        fav += on_locus
    return fav, tot


# -- Euler products ----------------------------------------------------------------


def test_trivial_euler_product():
    V = ZSet([("a", 1), ("b", 3)])
    assert mep_product(V, OrbitFunction.constant(V, SymSeries.one(4, 4))) == SymSeries.one(4, 4)


def test_single_rational_orbit_product_is_value():
    H = rand_series(random.Random(2), 4, 4, unit=True)
    V = ZSet.orbit(1, "o")
    assert mep_product(V, OrbitFunction(V, {"o": H})) == H
    assert mep_ghost_classical(V, OrbitFunction(V, {"o": H}), 1) == sf_ghost_slice(H, 1)


def test_degree_two_orbit_squares_variables():
    H = rand_series(random.Random(4), 4, 4, unit=True)
    V = ZSet.orbit(2, "o")
    f = OrbitFunction(V, {"o": H})
    definitional = sf_exp_sigma(sf_substitute_coefficients(2, sf_log_sigma(H)))
    assert mep_product(V, f) == definitional
    assert mep_ghost_classical(V, f, 1) == sf_ghost_slice(H, 1).dilate(2) == sf_ghost_slice(definitional, 1)


def test_fiberwise_evaluation():
    rng = random.Random(8)
    B = ZSet([("b", 1), ("c", 2)])
    fibers = {"b": ZSet([("x", 1), ("y", 2)]), "c": ZSet([("z", 1)])}
    M = ZMap(B, fibers)
    H = OrbitFunction(M.total(), {k: rand_series(rng, 3, 6, unit=True) for k in M.total().keys()})
    prod = mep_product(M, H)
    for bk, fib in fibers.items():
        local = mep_product(fib, OrbitFunction(fib, {vk: H((bk, vk)) for vk in fib.keys()}))
        assert prod(bk) == local


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_classical_product_variants(seed):
    rng = random.Random(seed)
    V = rand_zset(rng, 4, 4)
    N, k = 3, rng.randint(1, 4)
    H = OrbitFunction(V, {key: rand_series(rng, N, 4, unit=True) for key in V.keys()})
    slice_k = sf_ghost_slice(mep_product(V, H), k)
    assert mep_ghost_classical(V, H, k, "extended") == slice_k == mep_ghost_classical(V, H, k, "gcd")


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_constant_product_is_power(seed):
    rng = random.Random(seed)
    V = rand_zset(rng, 4, 3)
    H = rand_series(rng, 3, 12, unit=True)
    lhs = mep_product(V, OrbitFunction.uniform(V, lambda d: value_adams(d, H)))
    rhs = sf_power(H, zs_class(V, 36))
    assert lhs == rhs.with_budget(lhs.N, lhs.K)


# -- binomial distribution ------------------------------------------------------------


def test_binomial_edge_cases():
    N, K = 4, 3
    P = N * K
    assert mep_binomial(WittVec.zero(P), WittVec.constant(5, P), N, K) == SymSeries.one(N, K)
    p = WittVec([Fraction(1, k + 1) for k in range(P)])
    S = SymFunc({})
    for j in range(1, N + 1):
        S = S + SymFunc.h(j)
    assert mep_binomial(p, WittVec.unit(P), N, K) == SymSeries.one(N, K) + SymSeries.from_symfunc(S, N, K,
                                                                                                  coefficient=p)


def test_binomial_linear_term():
    N, K = 4, 3
    P = N * K
    p = WittVec([Fraction(1, k + 2) for k in range(P)])
    E = WittVec([k * k + 3 for k in range(P)])
    F = mep_binomial(p, E, N, K)
    for k in range(1, K + 1):
        assert m1_ghost(F, k) == E.ghost[k - 1] * p.ghost[k - 1]


# -- character family ------------------------------------------------------------------


def test_character_census():
    germs = list(itertools.product(range(3), repeat=2))
    nonzero = [g for g in germs if any(g)]
    assert (sum(1 for g in nonzero if g[0]), len(nonzero)) == (6, 8)
    assert character_germ_census(3, 2) == (6, 8)
    check = character_fraction_check(3, 2)
    assert check["census"] == Fraction(3, 4) and check["printed"] == Fraction(1, 4) and check["discrepancy"]


def test_character_series():
    F = mep_family(FamilySpec("character", q=3, ell=2, N=4, K=2))
    table = sf_to_basis(F, "m")
    assert (1,) not in table
    # linear term in h_2: [A^1] ghost_1 = 3 times c_1 = 3/4
    assert table[(2,)].ghost[0] == RATIONAL(Fraction(9, 4))
    printed = mep_family(FamilySpec("character", q=3, ell=2, N=4, K=2, fraction="printed"))
    assert sf_to_basis(printed, "m")[(2,)].ghost[0] == RATIONAL(Fraction(3, 4))
    with pytest.raises(ValueError):
        mep_family(FamilySpec("character", q=3, ell=3, N=3, K=2))


# -- transversality families -----------------------------------------------------------------


def test_smooth_hypersurface_parameter():
    assert smooth_jet_census(2, 1) == (1, 3)
    assert smooth_jet_census(3, 2) == (8, 26)
    F = mep_family(FamilySpec("smooth_hypersurface", q=2, ell=1, n=1, N=4, K=4))
    # exponent [P^1] has ghost_1 = 3
    assert m1_ghost(F) == RATIONAL(1)
    G = mep_family(FamilySpec("smooth_hypersurface", q=3, ell=2, n=2, N=3, K=2))
    assert m1_ghost(G) == RATIONAL(13) * RATIONAL(Fraction(4, 13))
    with pytest.raises(ValueError):
        mep_family(FamilySpec("smooth_hypersurface", q=2, ell=1, n=2, N=3, K=2))


def test_identity_base_is_plain_binomial():
    spec = FamilySpec("smooth_hypersurface", q=2, ell=1, n=1, N=3, K=3, base=ZSet.point())
    F = mep_family(spec)
    p = WittVec.from_function(lambda k: Fraction(2**k - 1, 4**k - 1), 9)
    assert F == mep_binomial(p, WittVec.unit(9), 3, 3)


def test_linear_independence_probability():
    assert linear_independence_probability(Fraction(2), 2, 2) == Fraction(3, 8)
    assert linear_independence_probability(Fraction(2), 3, 0) == 1


def test_ci_success_parameter():
    tw = tower(1, 2)
    assert ci_jet_census(2, 2, 2) == (6, 54)
    p = ci_success_parameter(2, 0, 2, 3, tw)
    assert p.ghost[0] == tw(Fraction(1, 9))
    for q, m in ((2, 0), (3, 1), (5, 2)):
        tw = tower(1, q)
        p = ci_success_parameter(q, m, 1, 4, tw)
        assert p.ghost == tuple(tw(Fraction(q ** (k * (m + 1)) - 1, q ** (k * (m + 2)) - 1)) for k in range(1, 5))


@pytest.mark.parametrize("q,m,r", [(2, 0, 1), (2, 0, 2), (3, 1, 2), (9, 1, 1), (5, 2, 2), (2, 2, 3)])
def test_ci_parameter_is_close_to_point_probability(q, m, r):
    p = ci_success_parameter(q, m, r, 6, tower(1, q))
    for k in range(1, 7):
        gap = abs(p.ghost[k - 1].to_fraction() - Fraction(1, q ** (k * r)))
        assert gap * q ** (k * (m + 1 + r)) <= 2


def test_ci_zeta_census_at_q3():
    fav, tot = ci_jet_census(3, 2, 2)
    p = ci_success_parameter(3, 0, 2, 2, tower(1, 3))
    assert p.ghost[0] == tower(1, 3)(Fraction(fav, tot))


def test_ci_mu_on_projective_plane():
    spec = FamilySpec("ci_lfunction", q=5, m=1, r=1, n=2, N=2, K=2)
    tw = spec.tower()
    mu = ci_mu(spec)
    assert mu.ghost[0] == tw.s() + tw.s().inverse()


@pytest.mark.parametrize("m", [0, 1, 2])
def test_ci_lfunction_routes_agree(m):
    spec = FamilySpec("ci_lfunction", q=9, m=m, r=1, n=m + 1, N=4, K=4)
    assert mep_family_ci_lfunction(spec) == ci_lfunction_via_transform(spec)


def test_ci_lfunction_linear_term_cancels_for_hyperplane_sections():
    spec = FamilySpec("ci_lfunction", q=9, m=2, r=1, n=3, N=3, K=2)
    tw = spec.tower()
    zeta = mep_family_ci_zeta(FamilySpec("ci_zeta", q=9, m=2, r=1, n=3, N=3, K=2))
    zeta_h1 = sf_to_basis(zeta, "h")[(1,)].ghost[0]
    assert zeta_h1 == tw(Fraction(728, 6560) * 820)
    # the h_1 term of the L-function MGF is zeta_h1 / q + mu, which vanishes here
    assert zeta_h1 * tw(Fraction(1, 9)) + ci_mu(spec).ghost[0] == tw.zero()
    F = mep_family_ci_lfunction(spec)
    assert (1,) not in sf_to_basis(F, "h")


# -- Hirzebruch surfaces ------------------------------------------------------------------------


def test_hirzebruch_case_counts():
    assert hirzebruch_case_counts(2) == (12, 24, 8, 44)
    assert hirzebruch_case_counts(3) == (144, 324, 162, 630)
    for Q in (2, 3, 4, 5):
        assert hirzebruch_case_counts(Q)[3] == Q**6 - Q**4 - Q**3 + Q**2


def test_hirzebruch_linear_term():
    F = mep_family(FamilySpec("hirzebruch", q=2, N=3, K=2))
    assert m1_ghost(F) == RATIONAL(Fraction(45, 11))
    assert m1_ghost(F) == RATIONAL(Fraction(3 * (12 * 1 + 24 * 2 + 8 * 0), 44))


# -- random-matrix comparisons ---------------------------------------------------------------


def test_reference_series_shapes():
    N, K = 4, 2
    h2 = reference_series("h2", N, K)
    assert sf_log_sigma(h2) == SymSeries.from_symfunc(SymFunc.h(2), N, K)
    e2 = reference_series("e2", N, K)
    assert sf_log_sigma(e2) == SymSeries.from_symfunc(SymFunc.e(2), N, K)
    with pytest.raises(ValueError):
        reference_series("h3", N, K)


def test_reduce_mod_qhalf_against_itself_and_far_series():
    ref = reference_series("h2", 4, 2, tower(1, 9))
    out = mep_reduce_mod_qhalf(ref, ref, 9, 1)
    assert out["passed"] and out["max_ratio"] == 0
    far = ref + SymSeries.from_symfunc(SymFunc.p(1), 4, 2, tower(1, 9)) * 5
    bad = mep_reduce_mod_qhalf(far, ref, 9, 1)
    assert not bad["passed"] and bad["worst_partition"] == "1"


def test_unknown_family():
    with pytest.raises(ValueError):
        mep_family(FamilySpec("nope", q=2))
