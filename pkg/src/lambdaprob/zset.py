"""Admissible Z-sets described by their orbits, and maps described by their fibers.

A finite :class:`ZSet` is an ordered tuple of orbits ``(key, degree)``; keys are
arbitrary hashable labels so that functions on the set can be stored per orbit.
An infinite Z-set is a memoized orbit-count generator ``d -> a_d`` valid up to
a degree cap.  A :class:`ZMap` ``V -> B`` stores, for every orbit of a finite
base, the fiber as a Z-set whose action is the original one raised to the
degree of the base orbit.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Callable, Hashable, Iterable

from .scalars import RATIONAL, Tower
from .witt import PrecisionError, WittVec

__all__ = [
    "ZSet",
    "ZMap",
    "zs_class",
    "zs_extend",
    "zs_projective_space",
    "zs_product",
    "zmap_fiber",
    "zmap_identity",
    "zmap_projection",
    "zmap_extend",
    "zmap_base_change",
    "CartesianSquare",
]


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    return -result if m > 1 else result


class ZSet:
    """An admissible Z-set.

    Finite sets keep explicit orbits.  Infinite sets keep a counting function
    with a degree cap; orbits of degree d are then labelled ``(d, i)``.
    """

    def __init__(self, orbits: Iterable[tuple[Hashable, int]] | None = None, *,
                 counter: Callable[[int], int] | None = None, cap: int | None = None, name: str = ""):
        if (orbits is None) == (counter is None):
            raise ValueError("give either explicit orbits or an orbit counter")
        self.name = name
        if orbits is not None:
            self.orbits = tuple((k, int(d)) for k, d in orbits)
            if any(d < 1 for _, d in self.orbits):
                raise ValueError("orbit degrees must be positive")
            if len({k for k, _ in self.orbits}) != len(self.orbits):
                raise ValueError("orbit keys must be distinct")
            self.finite = True
            self.cap = max((d for _, d in self.orbits), default=0)
            self._counter = None
            self._degree = dict(self.orbits)
        else:
            if cap is None:
                raise ValueError("an infinite Z-set needs a degree cap")
            self.finite = False
            self.cap = cap
            self._counter = counter
            self._memo: dict[int, int] = {}
            self._lock = threading.Lock()
            self.orbits = None
            self._degree = None

    @classmethod
    def from_counts(cls, counts: dict[int, int] | list[int], name: str = "") -> "ZSet":
        """Finite Z-set with a_d orbits of degree d, keyed (d, i)."""
        if isinstance(counts, (list, tuple)):
            counts = {d + 1: a for d, a in enumerate(counts)}
        return cls([((d, i), d) for d in sorted(counts) for i in range(counts[d])], name=name)

    @classmethod
    def point(cls) -> "ZSet":
        """The one-point set."""
        return cls([("pt", 1)], name="1")

    @classmethod
    def orbit(cls, d: int, key: Hashable = "o") -> "ZSet":
        return cls([(key, d)])

    def count(self, d: int) -> int:
        """Number a_d of orbits of degree d."""
        if d < 1:
            raise ValueError("degree must be positive")
        if self.finite:
            return sum(1 for _, e in self.orbits if e == d)
        if d > self.cap:
            raise PrecisionError(f"degree {d} beyond cap {self.cap} of {self.name or 'Z-set'}")
        with self._lock:
            if d not in self._memo:
                self._memo[d] = int(self._counter(d))
            return self._memo[d]

    def fixed_points(self, k: int) -> int:
        """#V(k) = sum over d | k of d * a_d."""
        if not self.finite and k > self.cap:
            raise PrecisionError(f"fixed points at {k} need cap >= {k}")
        return sum(d * self.count(d) for d in _divisors(k))

    def degree(self, key) -> int:
        if not self.finite:
            d, i = key
            if not 0 <= i < self.count(d):
                raise KeyError(key)
            return d
        return self._degree[key]

    def iter_orbits(self, max_degree: int | None = None):
        """Orbits (key, degree); for infinite sets up to ``max_degree`` (default cap)."""
        if self.finite:
            for k, d in self.orbits:
                if max_degree is None or d <= max_degree:
                    yield k, d
            return
        top = self.cap if max_degree is None else min(self.cap, max_degree)
        for d in range(1, top + 1):
            for i in range(self.count(d)):
                yield (d, i), d

    def keys(self):
        return [k for k, _ in self.iter_orbits()]

    def __len__(self):
        if not self.finite:
            raise TypeError("infinite Z-set has no length")
        return len(self.orbits)

    def is_empty(self) -> bool:
        return self.finite and not self.orbits

    def counts(self, upto: int | None = None) -> list[tuple[int, int]]:
        """Serialization as (degree, count) pairs."""
        top = self.cap if upto is None else upto
        return [(d, self.count(d)) for d in range(1, top + 1) if self.count(d)]

    def __repr__(self):
        if self.finite:
            return f"ZSet({self.counts()})"
        return f"ZSet(<{self.name}>, cap={self.cap})"


def zs_class(V: ZSet, K: int, tw: Tower = RATIONAL) -> WittVec:
    """[V]: the Witt vector with ghost_k = #V(k)."""
    if not V.finite and V.cap < K:
        raise PrecisionError(f"class to precision {K} needs cap >= {K}, have {V.cap}")
    return WittVec.from_function(V.fixed_points, K, tw)


def zs_extend(V: ZSet, k: int) -> ZSet:
    """V_k: the same set with the action multiplied by k.

    An orbit of degree d becomes gcd(d, k) orbits of degree d / gcd(d, k); in the
    finite case the children of orbit ``key`` are keyed ``(key, j)``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return V
    if V.finite:
        out = []
        for key, d in V.orbits:
            g = gcd(d, k)
            out.extend(((key, j), d // g) for j in range(g))
        return ZSet(out, name=f"{V.name}_{k}" if V.name else "")

    def counter(e: int) -> int:
        # orbits of degree d with d / gcd(d,k) = e; such d divide e*k.
        total = 0
        for d in _divisors(e * k):
            g = gcd(d, k)
            if d // g == e:
                total += g * V.count(d)
        return total

    return ZSet(counter=counter, cap=V.cap // k, name=f"{V.name}_{k}")


def zs_projective_space(q: int, n: int, D: int) -> ZSet:
    """Closed points of projective n-space over F_q, up to degree D."""
    if D < 1:
        raise ValueError("cap must be positive")

    def points(e: int) -> int:
        return sum(q ** (e * i) for i in range(n + 1))

    def counter(d: int) -> int:
        total = sum(_mobius(d // e) * points(e) for e in _divisors(d))
        assert total % d == 0
        return total // d

    return ZSet(counter=counter, cap=D, name=f"P{n}(F{q})")


def zs_product(V: ZSet, W: ZSet) -> ZSet:
    """V x W: orbits of degrees a and b give gcd(a,b) orbits of degree lcm(a,b)."""
    if not (V.finite and W.finite):
        raise ValueError("product is implemented for finite Z-sets")
    out = []
    for kv, a in V.orbits:
        for kw, b in W.orbits:
            g = gcd(a, b)
            out.extend((((kv, kw), j), a * b // g) for j in range(g))
    return ZSet(out)


@dataclass(frozen=True)
class ZMap:
    """A map V -> B of admissible Z-sets, stored fiberwise over a finite base."""

    base: ZSet
    fibers: dict = field(hash=False)

    def __post_init__(self):
        if not self.base.finite:
            raise ValueError("ZMap needs a finite base")
        missing = [k for k in self.base.keys() if k not in self.fibers]
        if missing:
            raise ValueError(f"fibers missing over base orbits {missing}")

    def total(self) -> ZSet:
        """The total space: fiber orbit v over base orbit b has degree deg(b) * deg(v)."""
        out = []
        for bk, bd in self.base.orbits:
            fib = self.fibers[bk]
            if not fib.finite:
                raise ValueError("total space of a map with infinite fibers is not enumerable")
            out.extend(((bk, vk), bd * vd) for vk, vd in fib.orbits)
        return ZSet(out)

    def has_section(self) -> bool:
        return all(not self.fibers[bk].is_empty() for bk in self.base.keys())


def zmap_fiber(M: ZMap, b) -> ZSet:
    if b not in M.fibers:
        raise KeyError(f"unknown base orbit {b!r}")
    return M.fibers[b]


def zmap_identity(B: ZSet) -> ZMap:
    return ZMap(B, {bk: ZSet.point() for bk in B.keys()})


def zmap_projection(V: ZSet, B: ZSet) -> ZMap:
    """The projection V x B -> B; over a degree-k orbit the fiber is V_k."""
    return ZMap(B, {bk: zs_extend(V, bd) for bk, bd in B.orbits})


def zmap_extend(M: ZMap, k: int) -> ZMap:
    """V_k -> B_k.  Base child (b, j) of degree deg(b)/g carries fiber (V_b)_{k/g}, g = gcd(deg b, k)."""
    Bk = zs_extend(M.base, k)
    fibers = {}
    for bk, bd in M.base.orbits:
        g = gcd(bd, k)
        fib = zs_extend(M.fibers[bk], k // g)
        for j in range(g):
            fibers[(bk, j) if k > 1 else bk] = fib
    return ZMap(Bk, fibers)


@dataclass(frozen=True)
class CartesianSquare:
    """V1 = V2 x_{B2} B1 for maps M2: V2 -> B2 and psi: B1 -> B2.

    ``M1`` is V1 -> B1.  A B1-orbit (b2, f) of relative degree a over b2 carries
    the fiber (V2_{b2})_a; its orbit (v, j) maps to the V2-orbit (b2, v).
    """

    M2: ZMap
    psi: ZMap
    M1: ZMap

    def phi(self, v1_key) -> tuple:
        """Image of a V1 orbit in V2, together with the degree ratio deg(v1)/deg(phi v1)."""
        (b2, f), (v, _j) = v1_key
        a = self.psi.fibers[b2].degree(f)
        e = self.M2.fibers[b2].degree(v)
        g = gcd(e, a)
        return (b2, v), a // g


def zmap_base_change(M2: ZMap, psi: ZMap) -> CartesianSquare:
    """Form the cartesian square of M2: V2 -> B2 along psi: B1 -> B2 (B1 = psi.total())."""
    if psi.base.keys() != M2.base.keys():
        raise ValueError("psi must map into the base of M2")
    B1 = psi.total()
    fibers = {}
    for b2, _ in M2.base.orbits:
        for f, a in psi.fibers[b2].orbits:
            fibers[(b2, f)] = zs_extend(M2.fibers[b2], a) if a > 1 else _relabel_trivial(M2.fibers[b2])
    return CartesianSquare(M2, psi, ZMap(B1, fibers))


def _relabel_trivial(V: ZSet) -> ZSet:
    # keep the (key, j) labelling uniform even when the multiplier is 1
    return ZSet([((k, 0), d) for k, d in V.orbits])
