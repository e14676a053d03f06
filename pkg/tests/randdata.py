"""Seeded random generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from lambdaprob.cfun import OrbitFunction
from lambdaprob.symfun import SymSeries, graded_precision, partitions_upto
from lambdaprob.witt import WittVec
from lambdaprob.zset import ZMap, ZSet


def rand_fraction(rng: random.Random, lo: int = -4, hi: int = 4, den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_witt(rng: random.Random, prec: int) -> WittVec:
    return WittVec([rand_fraction(rng) for _ in range(prec)])


def rand_series(rng: random.Random, N: int, K: int, density: float = 0.4, unit: bool = False) -> SymSeries:
    """Random series with zero constant term, or constant term 1 when ``unit``."""
    coeffs = {}
    for lam in partitions_upto(N):
        if lam and rng.random() < density:
            coeffs[lam] = rand_witt(rng, graded_precision(N, K, sum(lam)))
    F = SymSeries(coeffs, N, K)
    return SymSeries.one(N, K) + F if unit else F


def rand_zset(rng: random.Random, max_orbits: int = 5, max_degree: int = 4, prefix: str = "v",
              allow_empty: bool = False) -> ZSet:
    lo = 0 if allow_empty else 1
    n = rng.randint(lo, max_orbits)
    return ZSet([(f"{prefix}{i}", rng.randint(1, max_degree)) for i in range(n)])


def rand_zmap(rng: random.Random, base_orbits: int = 3, fiber_orbits: int = 3, max_degree: int = 3,
              section: bool = False) -> ZMap:
    """Random map over a random base; with ``section`` every fiber has a degree-1 orbit."""
    B = rand_zset(rng, base_orbits, max_degree, prefix="b")
    fibers = {}
    for bk in B.keys():
        fib = rand_zset(rng, fiber_orbits, max_degree, prefix="f")
        if section:
            fib = ZSet([("s", 1), *fib.orbits])
        fibers[bk] = fib
    return ZMap(B, fibers)


def rand_function(rng: random.Random, V: ZSet, make) -> OrbitFunction:
    return OrbitFunction(V, {key: make() for key in V.keys()})
