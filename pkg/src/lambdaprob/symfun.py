"""Truncated symmetric-function series with Witt-vector coefficients.

Series are stored in the power-sum basis: a :class:`SymSeries` maps partitions
(tuples of weakly decreasing positive integers) to the coefficient of
``p_tau = p_{tau_1} p_{tau_2} ...``.  Products concatenate indices and
plethysm by ``p_i`` is monomial (``p_tau -> p_{i tau}`` together with the Adams
operation on the coefficient), so every operation reduces to bookkeeping here.

Precision is graded.  A series with budget ``(N, K)`` stores a coefficient of
symmetric degree ``d >= 1`` with ``K * (N // d)`` ghost components and the
constant coefficient with ``K * N``.  This is exactly what Adams operations
consume: ``p_i`` sends degree ``d`` to degree ``i d`` and divides precision by
``i``, so ``(K * (N // d)) // i >= K * (N // (i d))``.  Every derived quantity
therefore keeps at least ``K`` exact ghost components in every coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .scalars import RATIONAL, Scalar, Tower
from .witt import PrecisionError, WittVec, witt_adams, witt_substitute

__all__ = [
    "Partition",
    "partitions",
    "partitions_upto",
    "partition_str",
    "parse_partition",
    "SymFunc",
    "SymSeries",
    "ScalarSeries",
    "graded_precision",
    "sf_multiply",
    "sf_plethysm",
    "sf_exp_sigma",
    "sf_exp_sigma_newton",
    "sf_log_sigma",
    "sf_power",
    "sf_to_basis",
    "sf_from_basis",
    "sf_ghost_slice",
    "sf_negate_distribution",
    "sf_dilate",
    "sf_dilate_m",
    "sf_adams_coefficients",
    "sf_substitute_coefficients",
    "sf_scale_variables",
]

Partition = tuple


# ---------------------------------------------------------------------------
# partitions


@lru_cache(maxsize=None)
def partitions(n: int, largest: int | None = None) -> tuple[Partition, ...]:
    """All partitions of n (parts <= largest), in reverse lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def partitions_upto(N: int) -> tuple[Partition, ...]:
    return tuple(lam for n in range(N + 1) for lam in partitions(n))


def partition_str(lam: Partition) -> str:
    """Report label such as "2+1+1"; the empty partition is written "0"."""
    return "+".join(str(x) for x in lam) if lam else "0"


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if text in ("", "0"):
        return ()
    return tuple(sorted((int(x) for x in text.split("+")), reverse=True))


@lru_cache(maxsize=1 << 16)
def _merge(a: Partition, b: Partition) -> Partition:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b, reverse=True))


def _dilate(lam: Partition, k: int) -> Partition:
    return tuple(k * x for x in lam)


def z_lambda(lam: Partition) -> int:
    """Size of the centralizer of a permutation of cycle type lam."""
    out = 1
    for part in set(lam):
        m = lam.count(part)
        out *= part**m * factorial(m)
    return out


def graded_precision(N: int, K: int, d: int) -> int:
    """Ghost precision stored for coefficients of symmetric degree d."""
    if d == 0:
        return K * max(N, 1)
    return K * (N // d)


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
    if m > 1:
        result = -result
    return result


# ---------------------------------------------------------------------------
# transition matrices between bases (rational, per degree)


def _count_assignments(lam: Partition, mu: Partition) -> int:
    """Coefficient of m_mu in p_lam: maps parts of lam -> parts of mu with matching sums."""

    @lru_cache(maxsize=None)
    def go(i: int, remaining: tuple) -> int:
        if i == len(lam):
            return 1 if not any(remaining) else 0
        total = 0
        for j, r in enumerate(remaining):
            if r >= lam[i]:
                nxt = remaining[:j] + (r - lam[i],) + remaining[j + 1 :]
                total += go(i + 1, nxt)
        return total

    return go(0, tuple(mu))


@lru_cache(maxsize=None)
def _p_to_m(n: int) -> dict:
    return {lam: {mu: c for mu in partitions(n) if (c := _count_assignments(lam, mu))} for lam in partitions(n)}


@lru_cache(maxsize=None)
def _elementary_in_p(n: int, sign: bool) -> dict:
    """h_n (sign=False) or e_n (sign=True) in the p-basis: sum eps p_lam / z_lam."""
    out = {}
    for lam in partitions(n):
        c = mpq(1, z_lambda(lam))
        if sign and (n - len(lam)) % 2:
            c = -c
        out[lam] = c
    return out


def _mul_rational(a: dict, b: dict) -> dict:
    out: dict = {}
    for la, ca in a.items():
        for lb, cb in b.items():
            key = _merge(la, lb)
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _basis_in_p(basis: str, n: int) -> dict:
    """Rows: basis element indexed by partition of n, expanded in the p-basis."""
    if basis == "p":
        return {lam: {lam: mpq(1)} for lam in partitions(n)}
    if basis == "m":
        return _invert(_p_to_m(n), n)
    rows = {}
    for tau in partitions(n):
        acc = {(): mpq(1)}
        for part in tau:
            acc = _mul_rational(acc, _elementary_in_p(part, basis == "e"))
        rows[tau] = acc
    return rows


def _invert(rows: dict, n: int) -> dict:
    """Invert a transition table {row: {col: c}} over Q (square, indexed by partitions of n)."""
    keys = list(partitions(n))
    idx = {k: i for i, k in enumerate(keys)}
    size = len(keys)
    mat = [[mpq(0)] * size + [mpq(1) if i == j else mpq(0) for j in range(size)] for i in range(size)]
    for r, row in rows.items():
        for c, v in row.items():
            mat[idx[r]][idx[c]] = mpq(v)
    for c in range(size):
        piv = next(r for r in range(c, size) if mat[r][c])
        mat[c], mat[piv] = mat[piv], mat[c]
        inv = 1 / mat[c][c]
        mat[c] = [v * inv for v in mat[c]]
        for r in range(size):
            if r != c and mat[r][c]:
                f = mat[r][c]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[c])]
    # rows expand old basis in new; the inverse expands the column basis in the row basis.
    return {keys[i]: {keys[j]: mat[i][size + j] for j in range(size) if mat[i][size + j]} for i in range(size)}


@lru_cache(maxsize=None)
def _p_in_basis(basis: str, n: int) -> dict:
    """p_lam expanded in ``basis``: {lam: {tau: c}}."""
    if basis == "p":
        return _basis_in_p("p", n)
    if basis == "m":
        return _p_to_m(n)
    return _invert(_basis_in_p(basis, n), n)


# ---------------------------------------------------------------------------
# rational symmetric functions (elements of Lambda_Q), used as plethysm operators


class SymFunc:
    """A finite symmetric function with rational coefficients, in the p-basis."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Partition, object] | None = None):
        self.coeffs = {tuple(k): mpq(v) if not isinstance(v, Fraction) else mpq(v.numerator, v.denominator)
                       for k, v in (coeffs or {}).items() if v}

    @classmethod
    def p(cls, n: int) -> "SymFunc":
        return cls({(n,) if n else (): 1})

    @classmethod
    def h(cls, n: int) -> "SymFunc":
        return cls(_elementary_in_p(n, False)) if n else cls({(): 1})

    @classmethod
    def e(cls, n: int) -> "SymFunc":
        return cls(_elementary_in_p(n, True)) if n else cls({(): 1})

    @classmethod
    def m(cls, mu: Partition) -> "SymFunc":
        mu = tuple(mu)
        return cls(_basis_in_p("m", sum(mu))[mu]) if mu else cls({(): 1})

    @classmethod
    def from_basis(cls, basis: str, tau: Partition) -> "SymFunc":
        tau = tuple(tau)
        return cls(_basis_in_p(basis, sum(tau))[tau])

    def __add__(self, other: "SymFunc") -> "SymFunc":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return SymFunc(out)

    def __sub__(self, other: "SymFunc") -> "SymFunc":
        return self + other * -1

    def __mul__(self, other) -> "SymFunc":
        if isinstance(other, SymFunc):
            return SymFunc(_mul_rational(self.coeffs, other.coeffs))
        r = mpq(other) if not isinstance(other, Fraction) else mpq(other.numerator, other.denominator)
        return SymFunc({k: v * r for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SymFunc) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def plethysm(self, other: "SymFunc") -> "SymFunc":
        """self o other, with p_k o other obtained by dilating every index by k."""
        out = SymFunc({})
        for lam, c in self.coeffs.items():
            term = SymFunc({(): c})
            for part in lam:
                term = term * SymFunc({_dilate(mu, part): v for mu, v in other.coeffs.items()})
            out = out + term
        return out

    def to_basis(self, basis: str) -> dict:
        out: dict = {}
        for lam, c in self.coeffs.items():
            for tau, v in _p_in_basis(basis, sum(lam))[lam].items():
                out[tau] = out.get(tau, 0) + c * v
        return {k: v for k, v in out.items() if v}

    def __repr__(self):
        return "SymFunc(" + ", ".join(f"p[{partition_str(k)}]*{v}" for k, v in sorted(self.coeffs.items())) + ")"


# ---------------------------------------------------------------------------
# the main series type


def _ghost_mul(a: tuple, b: tuple, n: int) -> tuple:
    return tuple(x * y for x, y in zip(a[:n], b[:n]))


class SymSeries:
    """Symmetric series truncated at degree N with Witt coefficients in the p-basis."""

    __slots__ = ("N", "K", "tower", "coeffs")

    def __init__(self, coeffs: Mapping[Partition, WittVec], N: int, K: int, tw: Tower = RATIONAL):
        self.N = N
        self.K = K
        self.tower = tw
        clean = {}
        for lam, w in coeffs.items():
            lam = tuple(lam)
            d = sum(lam)
            if d > N:
                continue
            if w.tower is not tw:
                raise ValueError(f"coefficient over {w.tower} in a series over {tw}")
            w = w.truncate(graded_precision(N, K, d))
            if not w.is_zero():
                clean[lam] = w
        self.coeffs = clean

    @classmethod
    def _raw(cls, coeffs: dict, N: int, K: int, tw: Tower) -> "SymSeries":
        s = object.__new__(cls)
        s.N, s.K, s.tower, s.coeffs = N, K, tw, coeffs
        return s

    def prec(self, d: int) -> int:
        return graded_precision(self.N, self.K, d)

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, N: int, K: int, tw: Tower = RATIONAL) -> "SymSeries":
        return cls._raw({}, N, K, tw)

    @classmethod
    def one(cls, N: int, K: int, tw: Tower = RATIONAL) -> "SymSeries":
        return cls.constant(WittVec.unit(graded_precision(N, K, 0), tw), N, K)

    @classmethod
    def constant(cls, w: WittVec, N: int, K: int) -> "SymSeries":
        return cls({(): w}, N, K, w.tower)

    @classmethod
    def from_symfunc(cls, a: SymFunc, N: int, K: int, tw: Tower = RATIONAL,
                     coefficient: WittVec | None = None) -> "SymSeries":
        """Embed a rational symmetric function, optionally times a Witt coefficient."""
        out = {}
        for lam, c in a.coeffs.items():
            d = sum(lam)
            if d > N:
                continue
            p = graded_precision(N, K, d)
            w = WittVec.constant(c, p, tw)
            if coefficient is not None:
                w = w * coefficient.truncate(p)
            out[lam] = w
        return cls(out, N, K, tw)

    @classmethod
    def from_basis(cls, table: Mapping[Partition, WittVec], basis: str, N: int, K: int,
                   tw: Tower = RATIONAL) -> "SymSeries":
        return sf_from_basis(table, basis, N, K, tw)

    # -- arithmetic ---------------------------------------------------------------
    def _check(self, other: "SymSeries"):
        if (self.N, self.K) != (other.N, other.K) or self.tower is not other.tower:
            raise ValueError(
                f"incompatible series budgets ({self.N},{self.K},{self.tower}) vs ({other.N},{other.K},{other.tower})"
            )

    def __add__(self, other: "SymSeries") -> "SymSeries":
        self._check(other)
        out = dict(self.coeffs)
        for lam, w in other.coeffs.items():
            out[lam] = out[lam] + w if lam in out else w
        return SymSeries._raw({k: v for k, v in out.items() if not v.is_zero()}, self.N, self.K, self.tower)

    def __neg__(self) -> "SymSeries":
        return SymSeries._raw({k: -v for k, v in self.coeffs.items()}, self.N, self.K, self.tower)

    def __sub__(self, other: "SymSeries") -> "SymSeries":
        return self + (-other)

    def __mul__(self, other) -> "SymSeries":
        if isinstance(other, SymSeries):
            return sf_multiply(self, other)
        if isinstance(other, WittVec):
            return self.scale_witt(other)
        return SymSeries._raw({k: v.scale(other) for k, v in self.coeffs.items()}, self.N, self.K, self.tower)

    __rmul__ = __mul__

    def scale_witt(self, w: WittVec) -> "SymSeries":
        """Multiply every coefficient by the Witt vector w (needs precision K*N at degree 0)."""
        out = {}
        for lam, c in self.coeffs.items():
            p = self.prec(sum(lam))
            if w.prec < p:
                raise PrecisionError(f"Witt factor has precision {w.prec}, coefficient needs {p}")
            prod = WittVec._raw(_ghost_mul(c.ghost, w.ghost, p), self.tower)
            if not prod.is_zero():
                out[lam] = prod
        return SymSeries._raw(out, self.N, self.K, self.tower)

    def __pow__(self, e: int) -> "SymSeries":
        if e < 0:
            raise ValueError("use sf_power for non-natural exponents")
        result = SymSeries.one(self.N, self.K, self.tower)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, SymSeries):
            return NotImplemented
        return (self.N, self.K) == (other.N, other.K) and self.tower is other.tower and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.N, self.K, frozenset(self.coeffs)))

    def constant_term(self) -> WittVec:
        return self.coeffs.get((), WittVec.zero(self.prec(0), self.tower))

    def homogeneous(self, n: int) -> dict:
        return {lam: w for lam, w in self.coeffs.items() if sum(lam) == n}

    def coefficient(self, lam: Partition, basis: str = "p") -> WittVec:
        lam = tuple(lam)
        table = self.coeffs if basis == "p" else sf_to_basis(self, basis)
        return table.get(lam, WittVec.zero(self.prec(sum(lam)), self.tower))

    def with_budget(self, N: int, K: int) -> "SymSeries":
        """Re-truncate to a smaller budget."""
        if N > self.N or K > self.K:
            raise PrecisionError("cannot enlarge a series budget")
        return SymSeries(self.coeffs, N, K, self.tower)

    def __repr__(self):
        body = ", ".join(f"p[{partition_str(k)}]: {v!r}" for k, v in sorted(self.coeffs.items()))
        return f"SymSeries(N={self.N}, K={self.K}, {{{body}}})"


def _accumulate(acc: dict, key, ghost: tuple):
    cur = acc.get(key)
    acc[key] = ghost if cur is None else tuple(x + y for x, y in zip(cur, ghost))


def _freeze(acc: dict, tw: Tower) -> dict:
    out = {}
    for k, g in acc.items():
        if any(g):
            out[k] = WittVec._raw(g, tw)
    return out


def _graded_product(A: dict, B: dict, N: int, K: int, acc: dict, weight=None):
    """acc += A * B (dicts partition -> ghost tuple), truncated at degree N with graded precision."""
    for la, ga in A.items():
        da = sum(la)
        for lb, gb in B.items():
            d = da + sum(lb)
            if d > N:
                continue
            p = graded_precision(N, K, d)
            prod = tuple(x * y for x, y in zip(ga[:p], gb[:p]))
            if weight is not None:
                prod = tuple(x * weight for x in prod)
            _accumulate(acc, _merge(la, lb), prod)


def sf_multiply(F: SymSeries, G: SymSeries) -> SymSeries:
    """Product truncated at degree N (p-basis indices concatenate)."""
    F._check(G)
    acc: dict = {}
    A = {k: v.ghost for k, v in F.coeffs.items()}
    B = {k: v.ghost for k, v in G.coeffs.items()}
    _graded_product(A, B, F.N, F.K, acc)
    return SymSeries._raw(_freeze(acc, F.tower), F.N, F.K, F.tower)


def sf_adams_coefficients(i: int, F: SymSeries) -> SymSeries:
    """Coefficient-wise Adams operation (the operation written p_i * F): variables untouched.

    The budget becomes (N, K // i).
    """
    K2 = F.K // i
    if K2 == 0:
        raise PrecisionError(f"coefficient-wise p_{i} needs K >= {i}")
    out = {lam: witt_adams(i, w).truncate(graded_precision(F.N, K2, sum(lam))) for lam, w in F.coeffs.items()}
    return SymSeries._raw({k: v for k, v in out.items() if not v.is_zero()}, F.N, K2, F.tower)


def sf_substitute_coefficients(i: int, F: SymSeries) -> SymSeries:
    """Apply the Witt substitution t -> t^i to every coefficient (variables untouched)."""
    out = {lam: witt_substitute(i, w).truncate(F.prec(sum(lam))) for lam, w in F.coeffs.items()}
    return SymSeries._raw({k: v for k, v in out.items() if not v.is_zero()}, F.N, F.K, F.tower)


def _adams_series(k: int, F: SymSeries) -> dict:
    """p_k o F as a dict partition -> ghost tuple (terms past degree N dropped)."""
    out = {}
    for lam, w in F.coeffs.items():
        d = k * sum(lam)
        if d > F.N and lam:
            continue
        p = graded_precision(F.N, F.K, d)
        g = witt_adams(k, w).ghost
        if len(g) < p:
            raise PrecisionError(f"p_{k} of a degree-{sum(lam)} coefficient leaves {len(g)} < {p} components")
        out[_dilate(lam, k)] = g[:p]
    return out


def sf_plethysm(a, F: SymSeries) -> SymSeries:
    """a o F for a rational symmetric function a (SymFunc, or SymSeries with constant coefficients)."""
    if isinstance(a, SymSeries):
        a = _as_symfunc(a)
    if () in a.coeffs and not F.constant_term().is_zero():
        raise ValueError("plethysm by a function with a constant term needs F without constant term")
    cache: dict = {}

    def power(k):
        if k not in cache:
            cache[k] = _adams_series(k, F)
        return cache[k]

    acc: dict = {}
    one = {(): (F.tower.one(),) * graded_precision(F.N, F.K, 0)}
    for lam, c in a.coeffs.items():
        term = one
        for part in lam:
            nxt: dict = {}
            _graded_product(term, power(part), F.N, F.K, nxt)
            term = nxt
        for key, g in term.items():
            _accumulate(acc, key, tuple(x * c for x in g))
    return SymSeries._raw(_freeze(acc, F.tower), F.N, F.K, F.tower)


def _as_symfunc(a: SymSeries) -> SymFunc:
    out = {}
    for lam, w in a.coeffs.items():
        first = w.ghost[0]
        if any(g != first for g in w.ghost) or not first.is_rational():
            raise ValueError("plethysm operator must have rational (constant) coefficients")
        out[lam] = first.to_mpq()
    return SymFunc(out)


def _by_degree(d: dict) -> dict:
    out: dict = {}
    for lam, g in d.items():
        out.setdefault(sum(lam), {})[lam] = g
    return out


def sf_exp_sigma(F: SymSeries) -> SymSeries:
    """Exp_sigma(F) = sum_k h_k o F, for F without constant term.

    Computed as exp(sum_k (p_k o F)/k) with the degree-graded recursion
    n E_n = sum_{j=1}^{n} j G_j E_{n-j}, where G = sum_k (p_k o F)/k and
    E_n, G_j are homogeneous components.
    """
    if not F.constant_term().is_zero():
        raise ValueError("Exp_sigma needs a series with zero constant term")
    N, K, tw = F.N, F.K, F.tower
    G: dict = {}
    for k in range(1, N + 1):
        inv = mpq(1, k)
        for lam, g in _adams_series(k, F).items():
            if lam:
                _accumulate(G, lam, tuple(x * inv for x in g))
    Gd = _by_degree(G)
    E = [{(): (tw.one(),) * graded_precision(N, K, 0)}]
    for n in range(1, N + 1):
        acc: dict = {}
        for j in range(1, n + 1):
            if j in Gd and E[n - j]:
                _graded_product(Gd[j], E[n - j], N, K, acc, weight=mpq(j, n))
        E.append({k: v for k, v in acc.items() if any(v)})
    out = {}
    for part in E:
        out.update(part)
    return SymSeries._raw(_freeze(out, tw), N, K, tw)


def sf_exp_sigma_newton(F: SymSeries) -> SymSeries:
    """Exp_sigma via n (h_n o F) = sum_{k=1}^{n} (p_k o F)(h_{n-k} o F), summing h_n o F for n <= N.

    Slower than :func:`sf_exp_sigma` but follows the defining sum term by term;
    kept as an independent route for cross-checks.
    """
    if not F.constant_term().is_zero():
        raise ValueError("Exp_sigma needs a series with zero constant term")
    N, K, tw = F.N, F.K, F.tower
    P = [None] + [SymSeries._raw(_freeze(_adams_series(k, F), tw), N, K, tw) for k in range(1, N + 1)]
    H = [SymSeries.one(N, K, tw)]
    for n in range(1, N + 1):
        acc = SymSeries.zero(N, K, tw)
        for k in range(1, n + 1):
            acc = acc + P[k] * H[n - k]
        H.append(acc * mpq(1, n))
    total = SymSeries.zero(N, K, tw)
    for term in H:
        total = total + term
    return total


def sf_log_sigma(G: SymSeries) -> SymSeries:
    """Inverse of Exp_sigma on series with constant term 1.

    L = log G by n L_n = n G_n - sum_{j<n} j L_j G_{n-j}; then
    Log_sigma G = sum_k mu(k)/k p_k o L.
    """
    N, K, tw = G.N, G.K, G.tower
    c0 = G.constant_term()
    if any(g != tw.one() for g in c0.ghost):
        raise ValueError("Log_sigma needs constant term 1")
    Gd = _by_degree({k: v.ghost for k, v in G.coeffs.items() if k})
    L: dict = {}
    for n in range(1, N + 1):
        acc: dict = {}
        for lam, g in Gd.get(n, {}).items():
            acc[lam] = g
        for j in range(1, n):
            if j in L and (n - j) in Gd:
                _graded_product(L[j], Gd[n - j], N, K, acc, weight=mpq(-j, n))
        L[n] = {k: v for k, v in acc.items() if any(v)}
    flat = {}
    for part in L.values():
        flat.update(part)
    logG = SymSeries._raw(_freeze(flat, tw), N, K, tw)
    out: dict = {}
    for k in range(1, N + 1):
        mu = _mobius(k)
        if mu == 0:
            continue
        w = mpq(mu, k)
        for lam, g in _adams_series(k, logG).items():
            _accumulate(out, lam, tuple(x * w for x in g))
    return SymSeries._raw(_freeze(out, tw), N, K, tw)


def sf_power(F: SymSeries, E) -> SymSeries:
    """The pre-lambda power F^E = Exp_sigma(E * Log_sigma F) for E a WittVec or SymSeries."""
    logF = sf_log_sigma(F)
    if isinstance(E, SymSeries):
        prod = logF * E
    elif isinstance(E, WittVec):
        prod = logF.scale_witt(E)
    else:
        prod = logF * E
    return sf_exp_sigma(prod)


def sf_to_basis(F: SymSeries, basis: str) -> dict:
    """Coefficient table of F in basis p, h, e or m (partition -> WittVec)."""
    if basis not in ("p", "h", "e", "m"):
        raise ValueError(f"unknown basis {basis!r}")
    if basis == "p":
        return dict(F.coeffs)
    acc: dict = {}
    for lam, w in F.coeffs.items():
        for tau, c in _p_in_basis(basis, sum(lam))[lam].items():
            _accumulate(acc, tau, tuple(x * c for x in w.ghost))
    return _freeze(acc, F.tower)


def sf_from_basis(table: Mapping[Partition, WittVec], basis: str, N: int, K: int,
                  tw: Tower = RATIONAL) -> SymSeries:
    """Build a series from coefficients in basis p, h, e or m."""
    if basis not in ("p", "h", "e", "m"):
        raise ValueError(f"unknown basis {basis!r}")
    acc: dict = {}
    for tau, w in table.items():
        tau = tuple(tau)
        d = sum(tau)
        if d > N:
            continue
        p = graded_precision(N, K, d)
        g = w.truncate(p).ghost
        for lam, c in _basis_in_p(basis, d)[tau].items():
            _accumulate(acc, lam, tuple(x * c for x in g))
    return SymSeries._raw(_freeze(acc, tw), N, K, tw)


def sf_negate_distribution(F: SymSeries) -> SymSeries:
    """Expand F in the h-basis and substitute h_tau -> (-1)^{|tau|} e_tau."""
    if any(g != F.tower.one() for g in F.constant_term().ghost):
        raise ValueError("negation transform needs constant term 1")
    h_table = sf_to_basis(F, "h")
    signed = {tau: (-w if sum(tau) % 2 else w) for tau, w in h_table.items()}
    return sf_from_basis(signed, "e", F.N, F.K, F.tower)


def sf_dilate(F: SymSeries, k: int) -> SymSeries:
    """Variable substitution t_j -> t_j^k: p_lam -> p_{k lam}, coefficients untouched."""
    out = {_dilate(lam, k): w for lam, w in F.coeffs.items() if k * sum(lam) <= F.N}
    return SymSeries(out, F.N, F.K, F.tower)


def sf_dilate_m(F: SymSeries, k: int) -> SymSeries:
    """Same substitution realized on the monomial basis: m_tau -> m_{k tau}."""
    table = sf_to_basis(F, "m")
    moved = {_dilate(tau, k): w for tau, w in table.items() if k * sum(tau) <= F.N}
    return sf_from_basis(moved, "m", F.N, F.K, F.tower)


# ---------------------------------------------------------------------------
# scalar-coefficient series (ghost slices and classical Euler products)


class ScalarSeries:
    """Symmetric series truncated at degree N with Scalar coefficients, p-basis."""

    __slots__ = ("N", "tower", "coeffs")

    def __init__(self, coeffs: Mapping[Partition, Scalar], N: int, tw: Tower = RATIONAL):
        self.N = N
        self.tower = tw
        self.coeffs = {tuple(k): tw(v) for k, v in coeffs.items() if sum(k) <= N and v}

    @classmethod
    def one(cls, N: int, tw: Tower = RATIONAL) -> "ScalarSeries":
        return cls({(): 1}, N, tw)

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return ScalarSeries(out, self.N, self.tower)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, other) -> "ScalarSeries":
        if isinstance(other, ScalarSeries):
            if other.N != self.N:
                raise ValueError("degree caps differ")
            out: dict = {}
            for la, a in self.coeffs.items():
                da = sum(la)
                for lb, b in other.coeffs.items():
                    if da + sum(lb) <= self.N:
                        key = _merge(la, lb)
                        out[key] = out[key] + a * b if key in out else a * b
            return ScalarSeries(out, self.N, self.tower)
        return ScalarSeries({k: v * other for k, v in self.coeffs.items()}, self.N, self.tower)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "ScalarSeries":
        result = ScalarSeries.one(self.N, self.tower)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def dilate(self, k: int) -> "ScalarSeries":
        return ScalarSeries({_dilate(l, k): v for l, v in self.coeffs.items()}, self.N, self.tower)

    def to_basis(self, basis: str) -> dict:
        out: dict = {}
        for lam, c in self.coeffs.items():
            for tau, v in _p_in_basis(basis, sum(lam))[lam].items():
                out[tau] = out[tau] + c * v if tau in out else c * v
        return {k: v for k, v in out.items() if v}

    def __eq__(self, other):
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        return self.N == other.N and self.coeffs == other.coeffs

    def __repr__(self):
        return "ScalarSeries(" + ", ".join(f"p[{partition_str(k)}]: {v}" for k, v in sorted(self.coeffs.items())) + ")"


def sf_ghost_slice(F: SymSeries, k: int) -> ScalarSeries:
    """Replace every coefficient by its k-th ghost component."""
    if not 1 <= k <= F.K:
        raise PrecisionError(f"ghost slice {k} outside precision K={F.K}")
    return ScalarSeries({lam: w.ghost[k - 1] for lam, w in F.coeffs.items()}, F.N, F.tower)


def sf_scale_variables(F: SymSeries, w: WittVec) -> SymSeries:
    """Substitute t_j -> w t_j: the degree-n coefficient is multiplied by the Witt power w^n."""
    out = {}
    for lam, c in F.coeffs.items():
        n = sum(lam)
        if n == 0:
            out[lam] = c
            continue
        p = F.prec(n)
        if w.prec < p:
            raise PrecisionError(f"scaling factor has precision {w.prec}, degree {n} needs {p}")
        out[lam] = WittVec._raw(tuple(x * y**n for x, y in zip(c.ghost[:p], w.ghost[:p])), F.tower)
    return SymSeries._raw(out, F.N, F.K, F.tower)
