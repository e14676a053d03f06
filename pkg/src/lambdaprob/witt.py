"""Truncated big Witt vectors over a scalar tower, held in ghost coordinates.

Ring operations are componentwise on ghost components.  The power-series
presentation ``1 + c_1 t + c_2 t^2 + ...`` is only an input/output codec:
the k-th ghost component is the coefficient of ``t^k`` in ``t d/dt log``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .scalars import RATIONAL, Scalar, Tower

__all__ = [
    "WittVec",
    "PrecisionError",
    "witt_from_series",
    "witt_to_series",
    "witt_ring",
    "witt_adams",
    "witt_substitute",
]


class PrecisionError(ValueError):
    """An operation needed more ghost components than a value carries."""


class WittVec:
    """Immutable truncated Witt vector with ghost components g_1..g_K."""

    __slots__ = ("ghost", "tower")

    def __init__(self, ghost: Sequence, tw: Tower | None = None):
        if not ghost:
            raise PrecisionError("a Witt vector needs at least one ghost component")
        if tw is None:
            first = ghost[0]
            tw = first.tower if isinstance(first, Scalar) else RATIONAL
        self.tower = tw
        self.ghost = tuple(g if isinstance(g, Scalar) and g.tower is tw else tw(g) for g in ghost)

    # -- constructors ----------------------------------------------------
    @classmethod
    def _raw(cls, ghost: tuple, tw: Tower) -> "WittVec":
        w = object.__new__(cls)
        w.ghost = ghost
        w.tower = tw
        return w

    @classmethod
    def constant(cls, value, prec: int, tw: Tower = RATIONAL) -> "WittVec":
        """The image of a scalar under Q -> W: ghost (c, c, ..., c), i.e. c times the unit."""
        v = tw(value)
        return cls._raw((v,) * prec, tw)

    @classmethod
    def unit(cls, prec: int, tw: Tower = RATIONAL) -> "WittVec":
        return cls.constant(1, prec, tw)

    @classmethod
    def zero(cls, prec: int, tw: Tower = RATIONAL) -> "WittVec":
        return cls.constant(0, prec, tw)

    @classmethod
    def teichmuller(cls, z, prec: int, tw: Tower = RATIONAL) -> "WittVec":
        """The class [z] = 1/(1 - z t), with ghost (z, z^2, ..., z^K)."""
        z = tw(z)
        out, cur = [], tw.one()
        for _ in range(prec):
            cur = cur * z
            out.append(cur)
        return cls._raw(tuple(out), tw)

    @classmethod
    def from_function(cls, fn, prec: int, tw: Tower = RATIONAL) -> "WittVec":
        """Ghost components g_k = fn(k) for k = 1..prec."""
        return cls._raw(tuple(tw(fn(k)) for k in range(1, prec + 1)), tw)

    # -- basic protocol ----------------------------------------------------
    @property
    def prec(self) -> int:
        return len(self.ghost)

    def __len__(self):
        return len(self.ghost)

    def __getitem__(self, k: int) -> Scalar:
        """1-based ghost component."""
        if not 1 <= k <= len(self.ghost):
            raise PrecisionError(f"ghost component {k} outside precision {len(self.ghost)}")
        return self.ghost[k - 1]

    def truncate(self, prec: int) -> "WittVec":
        if prec > len(self.ghost):
            raise PrecisionError(f"cannot extend precision {len(self.ghost)} to {prec}")
        if prec == len(self.ghost):
            return self
        return WittVec._raw(self.ghost[:prec], self.tower)

    def _pair(self, other) -> tuple[tuple, tuple]:
        if not isinstance(other, WittVec):
            other = WittVec.constant(other, len(self.ghost), self.tower)
        elif other.tower is not self.tower:
            raise ValueError(f"cannot mix Witt vectors over {self.tower} and {other.tower}")
        n = min(len(self.ghost), len(other.ghost))
        return self.ghost[:n], other.ghost[:n]

    def __add__(self, other):
        a, b = self._pair(other)
        return WittVec._raw(tuple(x + y for x, y in zip(a, b)), self.tower)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        return WittVec._raw(tuple(x - y for x, y in zip(a, b)), self.tower)

    def __rsub__(self, other):
        a, b = self._pair(other)
        return WittVec._raw(tuple(y - x for x, y in zip(a, b)), self.tower)

    def __neg__(self):
        return WittVec._raw(tuple(-x for x in self.ghost), self.tower)

    def __mul__(self, other):
        if isinstance(other, WittVec):
            a, b = self._pair(other)
            return WittVec._raw(tuple(x * y for x, y in zip(a, b)), self.tower)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, r) -> "WittVec":
        """Multiply by a rational number or scalar (the image of Q or the tower in W)."""
        return WittVec._raw(tuple(x * r for x in self.ghost), self.tower)

    def inverse(self) -> "WittVec":
        if not all(self.ghost):
            raise ZeroDivisionError("Witt vector with a zero ghost component is not invertible")
        return WittVec._raw(tuple(x.inverse() for x in self.ghost), self.tower)

    def __truediv__(self, other):
        if isinstance(other, WittVec):
            return self * other.inverse()
        return WittVec._raw(tuple(x / other for x in self.ghost), self.tower)

    def __rtruediv__(self, other):
        return WittVec.constant(other, len(self.ghost), self.tower) * self.inverse()

    def __pow__(self, e: int):
        return WittVec._raw(tuple(x**e for x in self.ghost), self.tower)

    def __eq__(self, other):
        if not isinstance(other, WittVec):
            return NotImplemented
        return self.tower is other.tower and self.ghost == other.ghost

    def __hash__(self):
        return hash(self.ghost)

    def agrees(self, other: "WittVec") -> bool:
        """Equality on the common ghost prefix (the only comparable data)."""
        a, b = self._pair(other)
        return a == b

    def is_zero(self) -> bool:
        return not any(self.ghost)

    def __repr__(self):
        return "WittVec(ghost=(" + ", ".join(str(g) for g in self.ghost) + "))"

    # -- Adams operations and substitution -------------------------------------
    def adams(self, i: int) -> "WittVec":
        return witt_adams(i, self)

    def substitute(self, i: int) -> "WittVec":
        return witt_substitute(i, self)

    def series(self) -> list[Scalar]:
        return witt_to_series(self)


def witt_from_series(c: Iterable) -> WittVec:
    """Ghost vector of 1 + c_1 t + ... + c_K t^K.

    Uses g_k = k c_k - sum_{i<k} c_i g_{k-i}, the coefficient form of
    t (d/dt) log(series).
    """
    c = list(c)
    if not c:
        raise PrecisionError("need at least one series coefficient")
    tw = next((x.tower for x in c if isinstance(x, Scalar)), RATIONAL)
    c = [tw(x) for x in c]
    g: list[Scalar] = []
    for k in range(1, len(c) + 1):
        acc = c[k - 1] * k
        for i in range(1, k):
            acc = acc - c[i - 1] * g[k - i - 1]
        g.append(acc)
    return WittVec._raw(tuple(g), tw)


def witt_to_series(w: WittVec) -> list[Scalar]:
    """Inverse of :func:`witt_from_series`: c_k = (g_k + sum_{i<k} c_i g_{k-i}) / k."""
    c: list[Scalar] = []
    for k in range(1, len(w.ghost) + 1):
        acc = w.ghost[k - 1]
        for i in range(1, k):
            acc = acc + c[i - 1] * w.ghost[k - i - 1]
        c.append(acc / k)
    return c


def witt_ring(a: WittVec, b: WittVec | None, op: str) -> WittVec:
    """Ring operation ``op`` in {add, mul, neg, inv}; b is ignored for unary ops."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown Witt operation {op!r}")


def witt_adams(i: int, w: WittVec) -> WittVec:
    """p_i applied to w: ghost (w_i, w_2i, ...) with precision floor(K/i)."""
    if i < 1:
        raise ValueError("Adams index must be positive")
    if i == 1:
        return w
    n = len(w.ghost) // i
    if n == 0:
        raise PrecisionError(f"Adams operation p_{i} needs precision >= {i}, have {len(w.ghost)}")
    return WittVec._raw(w.ghost[i - 1 :: i][:n], w.tower)


def witt_substitute(i: int, w: WittVec) -> WittVec:
    """The Witt vector w(t^i): ghost_k = i * w_{k/i} when i divides k, else 0.

    The result carries precision i*K, since every component up to i*K is known.
    """
    if i < 1:
        raise ValueError("substitution exponent must be positive")
    if i == 1:
        return w
    zero = w.tower.zero()
    out = []
    for g in w.ghost:
        out.extend([zero] * (i - 1))
        out.append(g * i)
    return WittVec._raw(tuple(out), w.tower)
