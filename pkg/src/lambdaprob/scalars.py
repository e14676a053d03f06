"""Exact scalars: rationals, optionally extended by a root of unity and a formal sqrt(q).

A :class:`Tower` fixes the order ``n`` of the root of unity ``z`` and the base
``q`` of the square root ``s``.  Scalars are tuples of rational coordinates in
the basis ``z^i * s^j`` (``0 <= i < phi(n)``, ``j`` in ``{0, 1}`` when ``s`` is
formal).  When ``q`` is a perfect square the root is an ordinary integer and no
generator is introduced.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq

__all__ = ["Tower", "Scalar", "tower", "RATIONAL", "scalar_arith", "as_mpq"]


def _cyclotomic(n: int) -> list[int]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    # x^n - 1 divided by every Phi_d with d | n, d < n.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, _cyclotomic(d))
    return poly


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert not any(num), "inexact cyclotomic division"
    return out


def as_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class Tower:
    """A number-field tower Q(z_n)[s]/(s^2 - q).  Build instances with :func:`tower`."""

    def __init__(self, n: int = 1, q: int | None = None):
        if n < 1:
            raise ValueError("root-of-unity order must be positive")
        self.n = n
        self.q = q
        # z is rational for n in {1, 2}: keep the basis one-dimensional there.
        self.phi = 1 if n <= 2 else len(_cyclotomic(n)) - 1
        self.root_int: int | None = None
        self.has_s = False
        if q is not None:
            if q <= 0:
                raise ValueError("q must be positive")
            r = math.isqrt(q)
            if r * r == q:
                self.root_int = r
            else:
                self.has_s = True
        self.dim = self.phi * (2 if self.has_s else 1)
        # z^k for 0 <= k < 2*phi, reduced to the basis 1, z, ..., z^(phi-1).
        if n > 2:
            cyc = _cyclotomic(n)
            red = []
            for k in range(2 * self.phi):
                v = [0] * (2 * self.phi)
                v[k] = 1
                for top in range(2 * self.phi - 1, self.phi - 1, -1):
                    c = v[top]
                    if c:
                        for j, cj in enumerate(cyc):
                            v[top - self.phi + j] -= c * cj
                red.append(tuple(v[: self.phi]))
            self._zred = red
        self._zero = Scalar(self, tuple(mpq(0) for _ in range(self.dim)))
        self._one = Scalar(self, (mpq(1),) + tuple(mpq(0) for _ in range(self.dim - 1)))

    def __repr__(self):
        return f"Tower(n={self.n}, q={self.q})"

    def __reduce__(self):
        return (tower, (self.n, self.q))

    # -- constructors -------------------------------------------------
    def zero(self) -> "Scalar":
        return self._zero

    def one(self) -> "Scalar":
        return self._one

    def __call__(self, x) -> "Scalar":
        """Coerce an integer, fraction or Scalar of this tower."""
        if isinstance(x, Scalar):
            if x.tower is not self:
                raise ValueError(f"cannot mix scalars of {x.tower} and {self}")
            return x
        if isinstance(x, (int, Rational)) or type(x).__name__ == "mpq":
            return Scalar(self, (as_mpq(x),) + tuple(mpq(0) for _ in range(self.dim - 1)))
        raise TypeError(f"cannot coerce {type(x).__name__} into {self}")

    def z(self) -> "Scalar":
        """The primitive n-th root of unity exp(2*pi*i/n)."""
        if self.n == 1:
            return self._one
        if self.n == 2:
            return self(-1)
        c = [mpq(0)] * self.dim
        if self.phi == 1:  # pragma: no cover - phi(n) == 1 only for n <= 2
            c[0] = mpq(1)
        else:
            c[self._index(1, 0)] = mpq(1)
        return Scalar(self, tuple(c))

    def s(self) -> "Scalar":
        """The square root of q (formal unless q is a perfect square)."""
        if self.q is None:
            raise ValueError("tower has no square root of q")
        if self.root_int is not None:
            return self(self.root_int)
        c = [mpq(0)] * self.dim
        c[self._index(0, 1)] = mpq(1)
        return Scalar(self, tuple(c))

    def sqrt_q_power(self, e: int) -> "Scalar":
        """s**e for any integer e (negative allowed)."""
        if self.q is None:
            raise ValueError("tower has no square root of q")
        base = self(mpq(self.q) ** (abs(e) // 2))
        if e % 2:
            base = base * self.s()
        return base if e >= 0 else base.inverse()

    def _index(self, i: int, j: int) -> int:
        return j * self.phi + i

    # -- multiplication ------------------------------------------------
    def _mul(self, a: tuple, b: tuple) -> tuple:
        if self.dim == 1:
            return (a[0] * b[0],)
        phi = self.phi
        out = [mpq(0)] * self.dim
        sq = mpq(self.q) if self.has_s else None
        for ja in range(2 if self.has_s else 1):
            for ia in range(phi):
                x = a[ja * phi + ia]
                if not x:
                    continue
                for jb in range(2 if self.has_s else 1):
                    for ib in range(phi):
                        y = b[jb * phi + ib]
                        if not y:
                            continue
                        c = x * y
                        j = ja + jb
                        if j == 2:
                            c *= sq
                            j = 0
                        k = ia + ib
                        if phi == 1:
                            out[j] += c
                        else:
                            for t, r in enumerate(self._zred[k]):
                                if r:
                                    out[j * phi + t] += c * r
        return tuple(out)

    def _inverse(self, a: tuple) -> tuple:
        if self.dim == 1:
            if not a[0]:
                raise ZeroDivisionError("division by zero scalar")
            return (1 / a[0],)
        # Solve (multiplication-by-a matrix) x = e_0 over Q by Gauss-Jordan.
        d = self.dim
        cols = []
        for k in range(d):
            e = [mpq(0)] * d
            e[k] = mpq(1)
            cols.append(self._mul(a, tuple(e)))
        m = [[cols[c][r] for c in range(d)] + [mpq(1) if r == 0 else mpq(0)] for r in range(d)]
        for c in range(d):
            piv = next((r for r in range(c, d) if m[r][c]), None)
            if piv is None:
                raise ZeroDivisionError("scalar is zero or a zero divisor in this tower")
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [v * inv for v in m[c]]
            for r in range(d):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [vr - f * vc for vr, vc in zip(m[r], m[c])]
        return tuple(m[r][d] for r in range(d))


@lru_cache(maxsize=None)
def tower(n: int = 1, q: int | None = None) -> Tower:
    """The unique tower with root-of-unity order n and square-root base q."""
    return Tower(n, q)



class Scalar:
    """Immutable exact element of a :class:`Tower`."""

    __slots__ = ("tower", "c")

    def __init__(self, tw: Tower, coords: tuple):
        self.tower = tw
        self.c = coords

    # -- coercion helpers ------------------------------------------------
    def _other(self, b) -> tuple:
        if isinstance(b, Scalar):
            if b.tower is not self.tower:
                raise ValueError(f"cannot mix scalars of {b.tower} and {self.tower}")
            return b.c
        return self.tower(b).c

    def __add__(self, b):
        bc = self._other(b)
        if len(bc) == 1:
            return Scalar(self.tower, (self.c[0] + bc[0],))
        return Scalar(self.tower, tuple(x + y for x, y in zip(self.c, bc)))

    __radd__ = __add__

    def __sub__(self, b):
        bc = self._other(b)
        if len(bc) == 1:
            return Scalar(self.tower, (self.c[0] - bc[0],))
        return Scalar(self.tower, tuple(x - y for x, y in zip(self.c, bc)))

    def __rsub__(self, b):
        return Scalar(self.tower, self._other(b)) - self

    def __neg__(self):
        return Scalar(self.tower, tuple(-x for x in self.c))

    def __mul__(self, b):
        if isinstance(b, Scalar):
            if b.tower is not self.tower:
                raise ValueError(f"cannot mix scalars of {b.tower} and {self.tower}")
            if len(b.c) == 1:
                return Scalar(self.tower, (self.c[0] * b.c[0],))
            return Scalar(self.tower, self.tower._mul(self.c, b.c))
        r = as_mpq(b)
        return Scalar(self.tower, tuple(x * r for x in self.c))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        return Scalar(self.tower, self.tower._inverse(self.c))

    def __truediv__(self, b):
        if isinstance(b, Scalar):
            return self * b.inverse()
        r = as_mpq(b)
        if not r:
            raise ZeroDivisionError("division by zero scalar")
        return Scalar(self.tower, tuple(x / r for x in self.c))

    def __rtruediv__(self, b):
        return Scalar(self.tower, self._other(b)) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.tower.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, b):
        try:
            return self.c == self._other(b)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.tower.n, self.tower.q, self.c))

    def __bool__(self):
        return any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_mpq(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.c[0]

    def to_fraction(self) -> Fraction:
        v = self.to_mpq()
        return Fraction(int(v.numerator), int(v.denominator))

    def to_complex(self) -> complex:
        tw = self.tower
        zeta = cmath.exp(2j * math.pi / tw.n)
        root = math.sqrt(tw.q) if tw.has_s else 1.0
        total = 0j
        for j in range(2 if tw.has_s else 1):
            for i in range(tw.phi):
                c = self.c[j * tw.phi + i]
                if c:
                    total += float(c) * zeta**i * root**j
        return total

    def __float__(self):
        v = self.to_complex()
        if abs(v.imag) > 1e-9 * max(1.0, abs(v.real)):
            raise ValueError(f"{self} is not real")
        return v.real

    def __abs__(self):
        return abs(self.to_complex())

    def __str__(self):
        tw = self.tower
        terms = []
        for j in range(1 if tw.has_s else 0, -1, -1):
            for i in range(tw.phi - 1, -1, -1):
                c = self.c[j * tw.phi + i]
                if not c:
                    continue
                mono = []
                if i:
                    mono.append(f"z^{i}")
                if j:
                    mono.append("s")
                if not mono:
                    terms.append(str(c))
                elif c == 1:
                    terms.append("*".join(mono))
                elif c == -1:
                    terms.append("-" + "*".join(mono))
                else:
                    terms.append(f"{c}*" + "*".join(mono))
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __repr__(self):
        return f"Scalar({self})"


RATIONAL = tower()


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Apply ``op`` in {add, sub, mul, div}; the result is in canonical form."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown scalar operation {op!r}")
