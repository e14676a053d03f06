"""Functions on admissible Z-sets with values in W (or in symmetric series over W).

Values are either :class:`~lambdaprob.witt.WittVec` or
:class:`~lambdaprob.symfun.SymSeries`; series-valued functions act
coefficient-wise (the structure written ``p_i * F``), which is what Euler
products need.
"""

from __future__ import annotations

from math import gcd
from typing import Callable, Hashable, Mapping

from .scalars import Scalar
from .symfun import SymSeries, sf_adams_coefficients, sf_substitute_coefficients
from .witt import PrecisionError, WittVec, witt_adams, witt_substitute
from .zset import ZMap, ZSet, zs_class, zs_extend

__all__ = [
    "OrbitFunction",
    "cf_pullback",
    "cf_integrate",
    "cf_integrate_point",
    "cf_restrict",
    "cf_restrict_total",
    "cf_expectation",
    "cf_expectation_ghost",
    "value_adams",
    "value_substitute",
]


def value_adams(i: int, v):
    if isinstance(v, SymSeries):
        return v if i == 1 else sf_adams_coefficients(i, v)
    return witt_adams(i, v)


def value_substitute(i: int, v):
    if isinstance(v, SymSeries):
        return v if i == 1 else sf_substitute_coefficients(i, v)
    return witt_substitute(i, v)


def _value_sum(values: list):
    """Sum values of one kind; series budgets are lowered to the smallest K present."""
    if not values:
        raise ValueError("empty sum needs a zero template")
    if isinstance(values[0], SymSeries):
        K = min(v.K for v in values)
        values = [v if v.K == K else v.with_budget(v.N, K) for v in values]
    total = values[0]
    for v in values[1:]:
        total = total + v
    return total


def _zero_like(v):
    if isinstance(v, SymSeries):
        return SymSeries.zero(v.N, v.K, v.tower)
    return WittVec.zero(v.prec, v.tower)


class OrbitFunction:
    """An element of C(V, W): one value per orbit.

    ``values`` is a mapping orbit key -> value, or a callable ``(key, degree) -> value``
    (degree-uniform functions ignore the key).
    """

    def __init__(self, domain: ZSet, values: Mapping | Callable):
        self.domain = domain
        if callable(values) and not isinstance(values, Mapping):
            self._rule = values
            self._table = None
        else:
            self._rule = None
            self._table = dict(values)
            if domain.finite:
                missing = [k for k in domain.keys() if k not in self._table]
                if missing:
                    raise ValueError(f"function undefined on orbits {missing[:5]}")

    @classmethod
    def uniform(cls, domain: ZSet, rule: Callable[[int], object]) -> "OrbitFunction":
        return cls(domain, lambda key, d: rule(d))

    @classmethod
    def constant(cls, domain: ZSet, value) -> "OrbitFunction":
        return cls(domain, lambda key, d: value)

    def __call__(self, key):
        if self._table is not None:
            return self._table[key]
        return self._rule(key, self.domain.degree(key))

    def items(self, max_degree: int | None = None):
        for key, d in self.domain.iter_orbits(max_degree):
            yield key, d, self(key)

    def map(self, fn: Callable) -> "OrbitFunction":
        if self.domain.finite:
            return OrbitFunction(self.domain, {k: fn(self(k)) for k in self.domain.keys()})
        rule = self._rule if self._rule is not None else (lambda key, d: self._table[key])
        return OrbitFunction(self.domain, lambda key, d: fn(rule(key, d)))

    def _binary(self, other: "OrbitFunction", op) -> "OrbitFunction":
        if not self.domain.finite:
            return OrbitFunction(self.domain, lambda key, d: op(self(key), other(key)))
        return OrbitFunction(self.domain, {k: op(self(k), other(k)) for k in self.domain.keys()})

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __mul__(self, other):
        if isinstance(other, OrbitFunction):
            return self._binary(other, lambda a, b: a * b)
        return self.map(lambda a: a * other)

    def __eq__(self, other):
        if not isinstance(other, OrbitFunction) or not self.domain.finite:
            return NotImplemented
        return self.domain.keys() == other.domain.keys() and all(self(k) == other(k) for k in self.domain.keys())


def cf_pullback(M: ZMap, g: OrbitFunction) -> OrbitFunction:
    """(phi^* g)(v) = p_{deg v / deg phi(v)} o g(phi v), on the total space of M."""
    total = M.total()
    out = {}
    for bk, _ in M.base.orbits:
        gb = g(bk)
        for vk, vd in M.fibers[bk].orbits:
            out[(bk, vk)] = value_adams(vd, gb)
    return OrbitFunction(total, out)


def cf_integrate(M: ZMap, f: OrbitFunction, zero=None) -> OrbitFunction:
    """(integral f)(b) = sum over fiber orbits v of f(v)(t^{deg v}), degrees taken in the fiber."""
    out = {}
    for bk, _ in M.base.orbits:
        terms = [value_substitute(vd, f((bk, vk))) for vk, vd in M.fibers[bk].orbits]
        if not terms:
            if zero is None:
                raise ValueError("empty fiber: pass a zero template")
            out[bk] = zero
        else:
            out[bk] = _value_sum(terms)
    return OrbitFunction(M.base, out)


def cf_integrate_point(V: ZSet, f: OrbitFunction, prec: int | None = None):
    """Integral over V -> 1.  Infinite V is handled through locality: ghost_k only
    sees orbits of degree dividing k, so orbits up to the needed precision suffice."""
    if V.finite:
        terms = [value_substitute(d, f(k)) for k, d in V.orbits]
        return _value_sum(terms)
    if prec is None:
        raise ValueError("integrating over an infinite Z-set needs a target precision")
    if prec > V.cap:
        raise PrecisionError(f"precision {prec} needs orbits up to degree {prec}, cap is {V.cap}")
    terms = []
    for key, d in V.iter_orbits(prec):
        terms.append(value_substitute(d, f(key)))
    total = _value_sum(terms)
    if isinstance(total, WittVec):
        return total.truncate(min(prec, total.prec))
    return total


def cf_restrict(f: OrbitFunction, k: int) -> OrbitFunction:
    """f on V_k: an orbit of degree d splits into gcd(d,k) orbits, each valued p_{k/gcd(d,k)} o f."""
    V = f.domain
    if k == 1:
        return f
    Vk = zs_extend(V, k)
    if V.finite:
        out = {}
        for key, d in V.orbits:
            g = gcd(d, k)
            val = value_adams(k // g, f(key))
            for j in range(g):
                out[(key, j)] = val
        return OrbitFunction(Vk, out)
    raise ValueError("restriction of functions on infinite Z-sets: restrict the degree rule instead")


def cf_restrict_total(M: ZMap, f: OrbitFunction, k: int) -> OrbitFunction:
    """Restriction of a function on the total space of M to the total space of zmap_extend(M, k)."""
    from .zset import zmap_extend

    Mk = zmap_extend(M, k)
    out = {}
    for bk, bd in M.base.orbits:
        gb = gcd(bd, k)
        kk = k // gb
        for j in range(gb):
            bkey = (bk, j) if k > 1 else bk
            for vk, vd in M.fibers[bk].orbits:
                D = bd * vd
                val = value_adams(k // gcd(D, k), f((bk, vk)))
                if kk == 1:
                    out[(bkey, vk)] = val
                else:
                    for i in range(gcd(vd, kk)):
                        out[(bkey, (vk, i))] = val
    return OrbitFunction(Mk.total(), out)


def cf_expectation(M: ZMap, f: OrbitFunction) -> OrbitFunction:
    """E_{V/B}[f](b) = (integral f)(b) / [V_b]; every fiber class must be invertible."""
    integral = cf_integrate(M, f)
    out = {}
    for bk, _ in M.base.orbits:
        val = integral(bk)
        prec = val.prec(0) if isinstance(val, SymSeries) else val.prec
        cls = zs_class(M.fibers[bk], prec, val.tower)
        if not all(cls.ghost):
            raise ZeroDivisionError(f"fiber over {bk!r} has a non-invertible class")
        inv = cls.inverse()
        out[bk] = val.scale_witt(inv) if isinstance(val, SymSeries) else val * inv
    return OrbitFunction(M.base, out)


def cf_expectation_ghost(V: ZSet, f: OrbitFunction, k: int) -> Scalar:
    """Uniform average over the fixed points V_k(1) of the first ghost component of f restricted to V_k."""
    if V.finite:
        Vk = zs_extend(V, k)
        fk = cf_restrict(f, k)
        vals = [fk(key)[1] for key, d in Vk.orbits if d == 1]
    else:
        vals = []
        for key, d in V.iter_orbits(k):
            if k % d == 0:
                vals.extend([witt_adams(k // d, f(key))[1]] * d)
    if not vals:
        raise ZeroDivisionError(f"V_{k}(1) is empty")
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total / len(vals)
