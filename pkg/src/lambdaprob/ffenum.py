"""Finite-field enumeration: fields, closed points, forms, transversality scans and empirical statistics.

Forms are evaluated at closed-point representatives through their digit
expansion over the prime field: the value of a form with prime-field
coefficients at a point of F_{p^e} is an F_p-linear function of the
coefficients, so a batch of forms is evaluated by one small matrix product
against a table of monomial digits, reduced mod p.  Point conditions that
need derivatives are only evaluated at the (rare) vanishing entries.

Only prime base fields are supported; extension fields appear as residue
fields of closed points and in the germ census.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

import numpy as np

from .scalars import RATIONAL, Scalar, Tower, tower
from .symfun import partitions_upto
from .witt import WittVec

__all__ = [
    "GF",
    "Form",
    "monomials",
    "closed_points",
    "affine_closed_points",
    "ff_enumerate_forms",
    "ff_zeta_ghost",
    "vanishing_predicate",
    "ff_char_L_ghost",
    "ff_is_power_free",
    "ff_transversality_filter",
    "ff_scan",
    "ff_empirical_mgf_ghost1",
    "ff_empirical_equidistribution",
    "ff_hirzebruch_census",
    "EmpiricalReport",
    "ScanResult",
    "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 2**24
_FLOAT_BUDGET = 8_000_000  # floats per matmul block


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % r for r in range(2, int(p**0.5) + 1))


# ---------------------------------------------------------------------------
# finite fields


class GF:
    """The field with p^k elements.

    Elements are the integers 0..p^k-1 read as base-p digit vectors of
    polynomials in a root x of the lexicographically first primitive
    polynomial; multiplication goes through discrete log tables.  All
    operations accept numpy arrays.
    """

    def __init__(self, p: int, k: int = 1):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be positive")
        self.p, self.k, self.Q = p, k, p**k
        self.modulus, exp = _primitive_polynomial(p, k)
        Q = self.Q
        self.exp = np.array(exp + exp, dtype=np.int64)
        log = np.full(Q, -1, dtype=np.int64)
        log[np.array(exp, dtype=np.int64)] = np.arange(Q - 1)
        self.log = log
        idx = np.arange(Q, dtype=np.int64)
        self.pows = p ** np.arange(k, dtype=np.int64)
        self.digits = (idx[:, None] // self.pows[None, :]) % p
        self.frob = self.pow(idx, p)

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (gf, (self.p, self.k))

    def from_digits(self, d) -> np.ndarray:
        return (np.asarray(d) % self.p) @ self.pows

    def add(self, a, b):
        return self.from_digits(self.digits[a] + self.digits[b])

    def sub(self, a, b):
        return self.from_digits(self.digits[a] - self.digits[b])

    def neg(self, a):
        return self.from_digits(-self.digits[a])

    def mul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        out = self.exp[(self.log[a] + self.log[b]) % (self.Q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def scale(self, c: int, a):
        """Multiply by the prime-field constant c."""
        return self.from_digits(self.digits[a] * (c % self.p))

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[(-self.log[a]) % (self.Q - 1)]

    def pow(self, a, n: int):
        a = np.asarray(a)
        out = self.exp[(self.log[a] * n) % (self.Q - 1)]
        if n == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def generator(self) -> int:
        return int(self.exp[1])

    def chi_exponents(self, ell: int) -> np.ndarray:
        """For y != 0, the exponent a with y^{(Q-1)/ell} = w^a, where w = g^{(p-1)/ell} and g is
        the chosen primitive root of F_p; zero maps to -1.  This fixes one order-ell character
        consistently on every extension field."""
        p, Q = self.p, self.Q
        if (p - 1) % ell:
            raise ValueError(f"ell={ell} does not divide p-1={p - 1}")
        base = gf(p, 1)
        idx = np.arange(Q)
        w = self.pow(idx, (Q - 1) // ell)  # lies in the prime field: integer value < p
        a = base.log[np.where(w == 0, 1, w)] // ((p - 1) // ell)
        return np.where(idx == 0, -1, a % ell)


def _primitive_polynomial(p: int, k: int) -> tuple[tuple, list[int]]:
    Q = p**k
    top = p ** (k - 1)
    for low in itertools.product(range(p), repeat=k):
        if low[0] == 0:
            continue
        # x^k = -(low[0] + low[1] x + ... ); multiply by x on digit vectors.
        red = [(-c) % p for c in low]
        exp = []
        cur = 1
        ok = True
        for i in range(Q - 1):
            if i and cur == 1:
                ok = False
                break
            exp.append(cur)
            t, rest = divmod(cur, top)
            shifted = rest * p
            if t:
                digits = [(shifted // p**j) % p for j in range(k)]
                digits = [(dj + t * rj) % p for dj, rj in zip(digits, red)]
                shifted = sum(dj * p**j for j, dj in enumerate(digits))
            cur = shifted
        if ok and cur == 1:
            return tuple(low) + (1,), exp
    raise RuntimeError(f"no primitive polynomial found for GF({p}^{k})")  # pragma: no cover


@lru_cache(maxsize=None)
def gf(p: int, k: int = 1) -> GF:
    return GF(p, k)


# ---------------------------------------------------------------------------
# closed points and monomials


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree d in nvars variables, descending lexicographic (x0^d first)."""
    if nvars == 1:
        return ((d,),)
    out = []
    for a in range(d, -1, -1):
        out.extend((a,) + rest for rest in monomials(nvars - 1, d - a))
    return tuple(out)


def _orbit_reps(F: GF, pts: np.ndarray, e: int) -> np.ndarray:
    """Rows of pts (element coordinates) whose Frobenius orbit has size exactly e, one per orbit."""
    weights = F.Q ** np.arange(pts.shape[1] - 1, -1, -1, dtype=np.int64)
    code = pts @ weights
    best = code.copy()
    deg = np.full(len(pts), e)
    cur = pts
    for j in range(1, e):
        cur = F.frob[cur]
        c = cur @ weights
        deg[(c == code) & (deg == e)] = j
        np.minimum(best, c, out=best)
    return pts[(deg == e) & (code == best)]


@lru_cache(maxsize=None)
def closed_points(p: int, n: int, e: int) -> np.ndarray:
    """Representatives (normalized coordinates in GF(p, e)) of the degree-e closed points of P^n over F_p."""
    F = gf(p, e)
    Q = F.Q
    blocks = []
    for i in range(n + 1):
        rest = n - i
        idx = np.arange(Q**rest, dtype=np.int64)
        arr = np.zeros((len(idx), n + 1), dtype=np.int64)
        arr[:, i] = 1
        for j in range(rest):
            arr[:, i + 1 + j] = (idx // Q ** (rest - 1 - j)) % Q
        blocks.append(arr)
    return _orbit_reps(F, np.concatenate(blocks), e)


@lru_cache(maxsize=None)
def affine_closed_points(p: int, e: int) -> np.ndarray:
    """Representatives z in GF(p, e) of the degree-e closed points of the affine line."""
    F = gf(p, e)
    return _orbit_reps(F, np.arange(F.Q, dtype=np.int64)[:, None], e)


def _power_table(F: GF, coords: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """Elements prod_i coords[P, i]^exps[m, i], shape (P, M)."""
    logc = F.log[coords]  # (P, v)
    zero = coords == 0
    L = (logc[:, None, :] * exps[None, :, :]).sum(axis=2) % (F.Q - 1)
    vanish = (zero[:, None, :] & (exps[None, :, :] > 0)).any(axis=2)
    return np.where(vanish, 0, F.exp[L])


# ---------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class Form:
    """A form over F_p in nvars variables: coefficients in the order of :func:`monomials`."""

    p: int
    nvars: int
    d: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != len(monomials(self.nvars, self.d)):
            raise ValueError("coefficient count does not match the monomial basis")

    @classmethod
    def from_dict(cls, p: int, nvars: int, d: int, terms: dict) -> "Form":
        mons = monomials(nvars, d)
        unknown = set(terms) - set(mons)
        if unknown:
            raise ValueError(f"exponents {sorted(unknown)} are not of degree {d}")
        return cls(p, nvars, d, tuple(terms.get(m, 0) % p for m in mons))

    def evaluate(self, F: GF, coords: np.ndarray) -> np.ndarray:
        """Values at points with coordinates in F (rows of coords)."""
        if F.p != self.p:
            raise ValueError("field characteristic differs from the form's")
        exps = np.array(monomials(self.nvars, self.d), dtype=np.int64)
        table = _power_table(F, np.atleast_2d(coords), exps)
        digits = F.digits[table] * np.array(self.coeffs, dtype=np.int64)[None, :, None]
        return F.from_digits(digits.sum(axis=1))


def ff_enumerate_forms(q: int, n: int, d: int, budget: int = EXHAUSTIVE_LIMIT):
    """Every form of degree d in n+1 variables over F_q, lexicographic in coefficient tuples."""
    M = len(monomials(n + 1, d))
    if q**M > budget:
        raise ValueError(f"{q}^{M} forms exceed the budget {budget}")
    for coeffs in itertools.product(range(q), repeat=M):
        yield Form(q, n + 1, d, coeffs)


def vanishing_predicate(forms: list[Form]):
    """Point-membership predicate of the common zero locus of forms."""

    def pred(F: GF, coords: np.ndarray) -> np.ndarray:
        ok = np.ones(len(coords), dtype=bool)
        for f in forms:
            ok &= f.evaluate(F, coords) == 0
        return ok

    return pred


def _projective_points(F: GF, n: int) -> np.ndarray:
    Q = F.Q
    blocks = []
    for i in range(n + 1):
        rest = n - i
        idx = np.arange(Q**rest, dtype=np.int64)
        arr = np.zeros((len(idx), n + 1), dtype=np.int64)
        arr[:, i] = 1
        for j in range(rest):
            arr[:, i + 1 + j] = (idx // Q ** (rest - 1 - j)) % Q
        blocks.append(arr)
    return np.concatenate(blocks)


def ff_zeta_ghost(predicate, q: int, n: int, K: int) -> WittVec:
    """Witt class of a subset of projective n-space: ghost_j counts F_{q^j}-points satisfying predicate."""
    counts = []
    for j in range(1, K + 1):
        F = gf(q, j)
        counts.append(int(np.count_nonzero(predicate(F, _projective_points(F, n)))))
    return WittVec(counts)


# ---------------------------------------------------------------------------
# univariate helpers


def _hasse(coeffs: list[int], j: int, p: int) -> list[int]:
    """Hasse derivative D^(j) of a polynomial given low-to-high."""
    return [comb(a, j) * c % p for a, c in enumerate(coeffs)][j:]


def _eval_univariate(F: GF, coeffs: list[int], z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, z), c % F.p)
    return acc


def ff_is_power_free(coeffs: list[int], ell: int, p: int) -> bool:
    """True if the polynomial (low-to-high coefficients over F_p) has no factor g^ell with deg g >= 1.

    A root of multiplicity >= ell is detected as a common zero of the Hasse
    derivatives of order < ell; such a root has degree <= deg f / ell.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] % p == 0:
        coeffs.pop()
    if not coeffs:
        return False
    d = len(coeffs) - 1
    for e in range(1, d // ell + 1):
        F = gf(p, e)
        z = affine_closed_points(p, e)[:, 0]
        bad = np.ones(len(z), dtype=bool)
        for j in range(ell):
            bad &= _eval_univariate(F, _hasse(coeffs, j, p), z) == 0
        if bad.any():
            return False
    return True


def _chi_tower(ell: int) -> Tower:
    return RATIONAL if ell <= 2 else tower(ell)


def _zeta_power(tw: Tower, ell: int, a: int) -> Scalar:
    if ell == 2:
        return tw(-1 if a % 2 else 1)
    return tw.z() ** (a % ell) if ell > 2 else tw.one()


def ff_char_L_ghost(f: list[int], ell: int, K: int, q: int) -> WittVec:
    """Ghost components of the character L-series: ghost_k = sum_{z in F_{q^k}} chi(f(z)^{(q^k-1)/ell}).

    f is given low-to-high over F_q; chi(0) = 0.  The character is the one fixed by
    :meth:`GF.chi_exponents`.
    """
    if (q - 1) % ell:
        raise ValueError(f"ell={ell} must divide q-1")
    if not ff_is_power_free(f, ell, q):
        raise ValueError("f must be power-free")
    tw = _chi_tower(ell)
    ghost = []
    for k in range(1, K + 1):
        F = gf(q, k)
        z = np.arange(F.Q, dtype=np.int64)
        a = F.chi_exponents(ell)[_eval_univariate(F, list(f), z)]
        counts = np.bincount(a[a >= 0], minlength=ell)
        total = tw.zero()
        for cls, n in enumerate(counts):
            if n:
                total = total + _zeta_power(tw, ell, cls) * int(n)
        ghost.append(total)
    return WittVec(ghost, tw)


# ---------------------------------------------------------------------------
# evaluation engine


class _Engine:
    """Digit tables for a monomial basis at the closed points of each degree."""

    def __init__(self, p: int, exps: np.ndarray, points, derivs: list[tuple[np.ndarray, np.ndarray]],
                 value_degrees: int, deriv_degrees: int):
        self.p = p
        self.exps = exps
        self.M = len(exps)
        self.values_tab: dict[int, np.ndarray] = {}
        self.deriv_tab: dict[int, np.ndarray] = {}
        self.npoints: dict[int, int] = {}
        self.bits_tab: dict[int, np.ndarray] = {}
        for e in range(1, value_degrees + 1):
            F = gf(p, e)
            pts = points(e)
            self.npoints[e] = len(pts)
            if not len(pts):
                continue
            table = F.digits[_power_table(F, pts, exps)]  # (P, M, e)
            self.values_tab[e] = np.ascontiguousarray(table.transpose(1, 0, 2).reshape(self.M, -1)).astype(np.float32)
            if p == 2:
                # bit planes: (M, e, W) words, bit j of a plane is the digit at point j
                planes = table.transpose(1, 2, 0).astype(np.uint8)
                pad = (-len(pts)) % 64
                planes = np.pad(planes, ((0, 0), (0, 0), (0, pad)))
                packed = np.packbits(planes, axis=2, bitorder="little")
                self.bits_tab[e] = np.ascontiguousarray(packed).view(np.uint64)
            if e <= deriv_degrees and derivs:
                parts = []
                for mult, dexps in derivs:
                    dt = F.digits[_power_table(F, pts, dexps)] * (mult % p)[None, :, None]
                    parts.append(dt % p)
                self.deriv_tab[e] = np.stack(parts, axis=2).astype(np.int32)  # (P, M, nd, e)

    def values(self, C: np.ndarray, e: int) -> np.ndarray:
        """Element values (S, P_e) of the rows of C at the degree-e points."""
        if e not in self.values_tab:
            return np.zeros((len(C), 0), dtype=np.int64)
        T = self.values_tab[e]
        P = self.npoints[e]
        Cf = C.astype(np.float32)
        step = max(1, _FLOAT_BUDGET // T.shape[1])
        out = np.empty((len(C), P), dtype=np.int64)
        pows = (self.p ** np.arange(e)).astype(np.float32)
        for lo in range(0, len(C), step):
            X = Cf[lo:lo + step] @ T
            np.remainder(X, self.p, out=X)
            out[lo:lo + step] = (X.reshape(-1, P, e) @ pows).astype(np.int64)
        return out

    def vanish(self, C: np.ndarray, e: int) -> np.ndarray:
        """Boolean (S, P_e): does the row vanish at the point.  Over F_2 this XORs packed bit planes."""
        if e not in self.bits_tab:
            return self.values(C, e) == 0
        B = self.bits_tab[e]
        P = self.npoints[e]
        W = B.shape[2]
        out = np.empty((len(C), P), dtype=bool)
        step = max(1, _FLOAT_BUDGET // (4 * e * W))
        for lo in range(0, len(C), step):
            Cc = C[lo:lo + step].astype(np.uint64)
            acc = np.zeros((len(Cc), e, W), dtype=np.uint64)
            for m in range(self.M):
                acc ^= Cc[:, m, None, None] * B[m][None]
            nonzero = np.bitwise_or.reduce(acc, axis=1)
            van = np.unpackbits((~nonzero).view(np.uint8), axis=1, bitorder="little")
            out[lo:lo + step] = van[:, :P].astype(bool)
        return out

    def derivs(self, C: np.ndarray, sidx: np.ndarray, pidx: np.ndarray, e: int) -> np.ndarray:
        """Element values (E, nd) of the derivative operators at entries (sample, point)."""
        D = self.deriv_tab[e]
        out = np.empty((len(sidx), D.shape[2]), dtype=np.int64)
        pows = self.p ** np.arange(e)
        step = max(1, _FLOAT_BUDGET // (self.M * D.shape[2] * e))
        for lo in range(0, len(sidx), step):
            s, pt = sidx[lo:lo + step], pidx[lo:lo + step]
            dig = np.einsum("em,emkd->ekd", C[s].astype(np.int32), D[pt]) % self.p
            out[lo:lo + step] = dig @ pows
        return out


def _partials(exps: np.ndarray, which) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    for i in which:
        shifted = exps.copy()
        shifted[:, i] = np.maximum(shifted[:, i] - 1, 0)
        out.append((exps[:, i].copy(), shifted))
    return out


def _hasse_ops(exps: np.ndarray, orders) -> list[tuple[np.ndarray, np.ndarray]]:
    a = exps[:, 0]
    out = []
    for j in orders:
        mult = np.array([comb(int(x), j) for x in a], dtype=np.int64)
        out.append((mult, np.maximum(exps - j, 0)))
    return out


def _rational_jet_matrix(p: int, exps: np.ndarray, point: tuple, ops) -> np.ndarray:
    """Integer matrix (M, len(ops)) with jet = coeffs @ matrix mod p at a rational point."""
    F = gf(p, 1)
    coords = np.array([[c % p for c in point]], dtype=np.int64)
    cols = []
    for mult, dexps in ops:
        cols.append((_power_table(F, coords, dexps)[0] * (mult % p)) % p)
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# scanners: one per geometric family


class _Scanner:
    """Shared interface: rows are coefficient vectors; ``scan`` returns admissibility,
    histogram statistics and jet cells."""

    p: int
    ncoef: int
    N: int
    scale_invariant: bool = False

    def full_row(self, C: np.ndarray) -> np.ndarray:
        return C

    def jet_cells(self, C: np.ndarray) -> np.ndarray:
        C = self.full_row(C)
        jets = (C @ self.jet_matrix) % self.p
        return jets @ (self.p ** np.arange(jets.shape[1]))

    def scaled_cells(self, C: np.ndarray) -> list[np.ndarray]:
        """Jet cells of lambda * row for every lambda in F_p^* (for scale-normalized enumeration)."""
        return [self.jet_cells((C * lam) % self.p) for lam in range(1, self.p)]

    def x_values(self, stats: tuple) -> list[Scalar]:
        counts = stats
        out = []
        for j in range(1, self.N + 1):
            out.append(RATIONAL(sum(e * counts[e - 1] for e in range(1, j + 1) if j % e == 0)))
        return out


class _HypersurfaceScanner(_Scanner):
    """V(F) in P^n (n = 1, 2): admissible iff V(F) has no singular point (squarefree for n = 1)."""

    scale_invariant = True

    def __init__(self, p: int, n: int, d: int, N: int, bprime, cap: int | None = None):
        if n not in (1, 2):
            raise ValueError("hypersurface scans cover P^1 and P^2")
        self.p, self.n, self.d, self.N = p, n, d, N
        self.exps = np.array(monomials(n + 1, d), dtype=np.int64)
        self.ncoef = len(self.exps)
        if cap is None:
            cap = max(1, d // 2) if n == 1 else max(1, d * (d - 1) // 2)
        self.cap = cap
        self.E = max(cap, N)
        self.engine = _Engine(p, self.exps, lambda e: closed_points(p, n, e),
                              _partials(self.exps, range(n + 1)), self.E, cap)
        pts = bprime if bprime is not None else [tuple([0] * n)]
        ops = [(np.ones(self.ncoef, dtype=np.int64), self.exps)] + _partials(self.exps, range(n))
        self.bprime = [tuple(pt) for pt in pts]
        self.jet_matrix = np.concatenate(
            [_rational_jet_matrix(p, self.exps, tuple(pt) + (1,), ops) for pt in self.bprime], axis=1)
        self.jet_len = n + 1
        self.local_cells = [c for c in range(p**self.jet_len) if c != 0]

    def scan(self, C: np.ndarray):
        S = len(C)
        bad = ~C.any(axis=1)
        counts = np.zeros((S, self.N), dtype=np.int64)
        alive = np.nonzero(~bad)[0]
        for e in range(1, self.E + 1):
            Ca = C[alive]
            van = self.engine.vanish(Ca, e)
            if e <= self.N:
                counts[alive, e - 1] = van.sum(axis=1)
            if e <= self.cap:
                s, pt = np.nonzero(van)
                if len(s):
                    g = self.engine.derivs(Ca, s, pt, e)
                    bad[alive[s[(g == 0).all(axis=1)]]] = True
                    alive = alive[~bad[alive]]
        return ~bad, counts, {}

    def symmetries(self):
        """Cell permutations induced by F -> lambda F and by linear changes of the affine chart."""
        p, n = self.p, self.n
        g = gf(p, 1).generator()

        def act(fn):
            return [_encode(fn(_decode(c, p, n + 1)), p) for c in range(p ** (n + 1))]

        gens = [act(lambda j: [x * g % p for x in j])]
        gens.append(act(lambda j: [j[0], j[1] * g % p] + j[2:]))
        if n == 2:
            gens.append(act(lambda j: [j[0], j[2], j[1]]))
            gens.append(act(lambda j: [j[0], j[1], (j[2] + j[1]) % p]))
        return gens


class _CharacterScanner(_Scanner):
    """Monic polynomials of degree d over F_p, admissible iff free of ell-th (or square) factors."""

    def __init__(self, p: int, ell: int, d: int, N: int, bprime, power_free: str = "ell"):
        if ell < 2 or (p - 1) % ell:
            raise ValueError("character scans need ell >= 2 with ell | p - 1")
        self.p, self.ell, self.d, self.N = p, ell, d, N
        self.mult = ell if power_free == "ell" else 2
        if power_free not in ("ell", "square"):
            raise ValueError("power_free is 'ell' or 'square'")
        self.exps = np.arange(d + 1, dtype=np.int64)[:, None]
        self.ncoef = d
        self.cap = d // self.mult
        self.E = max(self.cap, N)
        self.engine = _Engine(p, self.exps, lambda e: affine_closed_points(p, e),
                              _hasse_ops(self.exps, range(1, self.mult)), self.E, self.cap)
        self.chi = {e: gf(p, e).chi_exponents(ell) for e in range(1, N + 1)}
        pts = bprime if bprime is not None else [(0,)]
        self.bprime = [tuple(pt) for pt in pts]
        ops = _hasse_ops(self.exps, range(ell))
        self.jet_matrix = np.concatenate([_rational_jet_matrix(p, self.exps, pt, ops) for pt in self.bprime], axis=1)
        self.jet_len = ell
        self.local_cells = [c for c in range(p**ell) if c != 0]
        self.tw = _chi_tower(ell)

    def full_row(self, C):
        return np.concatenate([C, np.ones((len(C), 1), dtype=C.dtype)], axis=1)

    def scan(self, C: np.ndarray):
        Cf = self.full_row(C)
        S = len(C)
        bad = np.zeros(S, dtype=bool)
        stats = np.zeros((S, self.N * self.ell), dtype=np.int64)
        alive = np.arange(S)
        for e in range(1, self.E + 1):
            Ca = Cf[alive]
            if e <= self.N:
                vals = self.engine.values(Ca, e)
                van = vals == 0
                a = self.chi[e][vals]
                for cls in range(self.ell):
                    stats[alive, (e - 1) * self.ell + cls] = (a == cls).sum(axis=1)
            else:
                van = self.engine.vanish(Ca, e)
            if e <= self.cap:
                s, pt = np.nonzero(van)
                if len(s):
                    g = self.engine.derivs(Ca, s, pt, e)
                    bad[alive[s[(g == 0).all(axis=1)]]] = True
                    alive = alive[~bad[alive]]
        nonvanishing = (C[:, 0] != 0) & ~bad
        return ~bad, stats, {"nonvanishing_at_origin": int(nonvanishing.sum())}

    def symmetries(self):
        return []

    def x_values(self, stats):
        tw, ell = self.tw, self.ell
        out = []
        for j in range(1, self.N + 1):
            total = tw.zero()
            for e in range(1, j + 1):
                if j % e:
                    continue
                for cls in range(ell):
                    n = stats[(e - 1) * ell + cls]
                    if n:
                        total = total + _zeta_power(tw, ell, cls * (j // e)) * (e * n)
            out.append(total)
        return out


class _CIScanner(_Scanner):
    """Pairs (F1, F2) of plane forms, admissible iff V(F1, F2) is a transverse intersection."""

    def __init__(self, p: int, d1: int, d2: int, N: int, bprime, cap: int | None = None):
        self.p, self.d, self.N = p, (d1, d2), N
        self.exps = [np.array(monomials(3, d), dtype=np.int64) for d in (d1, d2)]
        self.M1, self.M2 = len(self.exps[0]), len(self.exps[1])
        self.ncoef = self.M1 + self.M2
        if cap is None:
            cap = max(d1 * d2 // 2, min(d1, d2))
        self.cap = cap
        self.E = max(cap, N)
        self.engines = [
            _Engine(p, ex, lambda e: closed_points(p, 2, e), _partials(ex, range(3)), self.E, cap)
            for ex in self.exps
        ]
        pts = bprime if bprime is not None else [(0, 0)]
        self.bprime = [tuple(pt) for pt in pts]
        mats = []
        for pt in self.bprime:
            blocks = []
            for ex in self.exps:
                ops = [(np.ones(len(ex), dtype=np.int64), ex)] + _partials(ex, range(2))
                blocks.append(_rational_jet_matrix(p, ex, tuple(pt) + (1,), ops))
            top = np.concatenate([blocks[0], np.zeros((self.M1, 3), dtype=np.int64)], axis=1)
            bottom = np.concatenate([np.zeros((self.M2, 3), dtype=np.int64), blocks[1]], axis=1)
            mats.append(np.concatenate([top, bottom], axis=0))
        self.jet_matrix = np.concatenate(mats, axis=1)
        self.jet_len = 6
        self.local_cells = [c for c in range(p**6) if _ci_jet_admissible(c, p)]

    def scan(self, C: np.ndarray):
        C1, C2 = C[:, : self.M1], C[:, self.M1:]
        S = len(C)
        bad = ~(C1.any(axis=1) & C2.any(axis=1))
        counts = np.zeros((S, self.N), dtype=np.int64)
        alive = np.nonzero(~bad)[0]
        for e in range(1, self.E + 1):
            A1, A2 = C1[alive], C2[alive]
            common = self.engines[0].vanish(A1, e) & self.engines[1].vanish(A2, e)
            if e <= self.N:
                counts[alive, e - 1] = common.sum(axis=1)
            if e <= self.cap:
                s, pt = np.nonzero(common)
                if len(s):
                    F = gf(self.p, e)
                    g1 = self.engines[0].derivs(A1, s, pt, e)
                    g2 = self.engines[1].derivs(A2, s, pt, e)
                    dependent = np.ones(len(s), dtype=bool)
                    for a, b in ((0, 1), (0, 2), (1, 2)):
                        minor = F.sub(F.mul(g1[:, a], g2[:, b]), F.mul(g1[:, b], g2[:, a]))
                        dependent &= minor == 0
                    bad[alive[s[dependent]]] = True
                    alive = alive[~bad[alive]]
        return ~bad, counts, {}

    def symmetries(self):
        """Cell permutations of the jet pair (rows F1, F2; columns value, d/dx0, d/dx1) induced by
        measure-preserving bijections of admissible pairs: scaling either form, row operations when
        the degrees agree, and linear changes of the chart coordinates fixing the point."""
        p = self.p
        g = gf(p, 1).generator()

        def act(fn):
            out = []
            for c in range(p**6):
                j = _decode(c, p, 6)
                r1, r2 = fn(j[:3], j[3:])
                out.append(_encode(list(r1) + list(r2), p))
            return out

        sc = lambda r: [x * g % p for x in r]
        gens = [act(lambda r1, r2: (sc(r1), r2))]
        if self.d[0] == self.d[1]:
            gens.append(act(lambda r1, r2: (r2, r1)))
            gens.append(act(lambda r1, r2: ([(a + b) % p for a, b in zip(r1, r2)], r2)))
        for col in (
            lambda r: [r[0], r[2], r[1]],
            lambda r: [r[0], r[1], (r[2] + r[1]) % p],
            lambda r: [r[0], r[1] * g % p, r[2]],
        ):
            gens.append(act(lambda r1, r2, col=col: (col(r1), col(r2))))
        return gens


def _decode(c: int, p: int, n: int) -> list[int]:
    return [(c // p**i) % p for i in range(n)]


def _encode(j, p: int) -> int:
    return sum(int(x) * p**i for i, x in enumerate(j))


def _ci_jet_admissible(cell: int, p: int) -> bool:
    j = [(cell // p**i) % p for i in range(6)]
    if j[0] or j[3]:
        return True
    return (j[1] * j[5] - j[2] * j[4]) % p != 0


def _scanner_for(family, d, N: int, bprime=None, power_free: str = "ell", cap: int | None = None) -> _Scanner:
    fam = family.family
    q = family.q
    if not _is_prime(q):
        raise ValueError("enumeration supports prime q")
    if fam in ("smooth_hypersurface", "exotic"):
        if family.ell != family.n:
            raise ValueError("the enumeration catalog covers W = P^n over Y = P^n (ell = n)")
        return _HypersurfaceScanner(q, family.n, int(d), N, bprime, cap)
    if fam == "character":
        return _CharacterScanner(q, family.ell, int(d), N, bprime, power_free)
    if fam == "ci_zeta":
        if family.r == 1:
            return _HypersurfaceScanner(q, family.n, int(d if not isinstance(d, tuple) else d[0]), N, bprime, cap)
        if family.n == 2 and family.r == 2:
            d1, d2 = d
            return _CIScanner(q, d1, d2, N, bprime, cap)
    raise ValueError(f"no enumeration for family {fam!r} with these parameters")


# ---------------------------------------------------------------------------
# scanning and aggregation


@dataclass
class ScanResult:
    """Aggregated scan: histogram of statistics over admissible rows and jet-cell counts."""

    histogram: Counter
    cells: np.ndarray
    admissible: int
    scanned: int
    extra: Counter
    mode: str
    seed: int | None


def _normalized_rows(p: int, M: int, lo: int, hi: int) -> np.ndarray:
    """Rows lo..hi-1 of the coefficient vectors whose first nonzero entry is 1."""
    sizes = [p ** (M - 1 - j) for j in range(M)]
    starts = np.cumsum([0] + sizes)
    idx = np.arange(lo, hi, dtype=np.int64)
    lead = np.searchsorted(starts, idx, side="right") - 1
    rest = idx - starts[lead]
    C = np.zeros((len(idx), M), dtype=np.int64)
    C[np.arange(len(idx)), lead] = 1
    for j in range(M):
        width = M - 1 - lead  # digits after the lead
        pos = j - lead - 1
        ok = pos >= 0
        C[ok, j] = (rest[ok] // (p ** (width[ok] - 1 - pos[ok]))) % p
    return C


def _all_rows(p: int, M: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    w = p ** np.arange(M - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // w[None, :]) % p


def _chunk_job(args):
    scanner, kind, lo, hi, seed, chunk_id, want_cells = args
    if kind == "normalized":
        C = _normalized_rows(scanner.p, scanner.ncoef, lo, hi)
    elif kind == "all":
        C = _all_rows(scanner.p, scanner.ncoef, lo, hi)
    else:
        rng = np.random.Generator(np.random.Philox(key=(seed << 64) | chunk_id))
        C = rng.integers(0, scanner.p, size=(hi - lo, scanner.ncoef), dtype=np.int64)
    adm, stats, extra = scanner.scan(C)
    hist = Counter()
    if adm.any():
        rows, counts = np.unique(stats[adm], axis=0, return_counts=True)
        for r, c in zip(rows, counts):
            hist[tuple(int(x) for x in r)] += int(c)
    ncell = scanner.p ** (scanner.jet_len * len(scanner.bprime))
    cells = np.zeros(ncell, dtype=np.int64)
    if want_cells and adm.any():
        Ca = C[adm]
        for cs in (scanner.scaled_cells(Ca) if kind == "normalized" else [scanner.jet_cells(Ca)]):
            cells += np.bincount(cs, minlength=ncell)
    return hist, cells, int(adm.sum()), len(C), Counter(extra)


def ff_scan(family, d, N: int = 3, samples: int | None = None, seed: int = 0, bprime=None,
            power_free: str = "ell", workers: int = 1, chunk: int = 4096, cells: bool = True,
            cap: int | None = None) -> ScanResult:
    """Scan a family exhaustively (samples=None) or by seeded Monte Carlo.

    Exhaustive scans of scale-invariant families enumerate forms with leading
    coefficient 1 and weight every result by p - 1, so counts refer to all
    nonzero forms.  Monte Carlo draws uniform coefficient vectors from a
    counter-based generator whose stream for each chunk depends only on the
    seed and the chunk index.
    """
    scanner = _scanner_for(family, d, N, bprime, power_free, cap)
    p, M = scanner.p, scanner.ncoef
    if samples is None:
        normalized = scanner.scale_invariant
        size = (p**M - 1) // (p - 1) if normalized else p**M
        if size > EXHAUSTIVE_LIMIT:
            raise ValueError(f"state space {size} exceeds the exhaustive limit; pass samples")
        kind, total, weight = ("normalized" if normalized else "all"), size, (p - 1 if normalized else 1)
    else:
        kind, total, weight = "random", samples, 1
    jobs = [(scanner, kind, lo, min(lo + chunk, total), seed, i, cells)
            for i, lo in enumerate(range(0, total, chunk))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    else:
        parts = [_chunk_job(j) for j in jobs]
    hist, extra = Counter(), Counter()
    ncell = p ** (scanner.jet_len * len(scanner.bprime))
    cellcount = np.zeros(ncell, dtype=np.int64)
    adm = scanned = 0
    for h, c, a, s, ex in parts:  # fixed order merge
        hist.update(h)
        cellcount += c
        adm += a
        scanned += s
        extra.update(ex)
    if weight != 1:
        hist = Counter({k: v * weight for k, v in hist.items()})
        extra = Counter({k: v * weight for k, v in extra.items()})
        adm *= weight
        scanned = scanned * weight + 1  # the zero form
    result = ScanResult(hist, cellcount, adm, scanned, extra, "exhaustive" if samples is None else "monte_carlo",
                        None if samples is None else seed)
    result.scanner = scanner
    return result


# ---------------------------------------------------------------------------
# reports


def _h_values(x: list[Scalar], N: int, tw: Tower) -> list[Scalar]:
    h = [tw.one()]
    for n in range(1, N + 1):
        acc = tw.zero()
        for j in range(1, n + 1):
            acc = acc + x[j - 1] * h[n - j]
        h.append(acc / n)
    return h


@dataclass
class EmpiricalReport:
    """Sample means of the m-basis coefficients (ghost 1) of Exp_sigma(X h_1)."""

    family: str
    q: int
    d: object
    N: int
    k: int
    mode: str
    seed: int | None
    samples: int
    scanned: int
    means: dict
    extra: dict = field(default_factory=dict)

    def deviation(self, theory: dict) -> dict:
        """Absolute deviation per partition against a table partition -> Scalar (or number)."""
        out = {}
        for tau, v in self.means.items():
            t = theory.get(tau, 0)
            tv = t.to_complex() if isinstance(t, Scalar) else complex(t)
            out[tau] = abs(v.to_complex() - tv)
        return out

    def max_deviation(self, theory: dict) -> float:
        return max(self.deviation(theory).values(), default=0.0)


def _report(family, d, N: int, k: int, res: ScanResult) -> EmpiricalReport:
    scanner = res.scanner
    if res.admissible == 0:
        raise ValueError("no admissible samples")
    tw = getattr(scanner, "tw", RATIONAL)
    taus = [t for t in partitions_upto(N)]
    sums = {t: tw.zero() for t in taus}
    for stats, count in sorted(res.histogram.items()):
        h = _h_values(scanner.x_values(stats), N, tw)
        for t in taus:
            val = tw.one()
            for part in t:
                val = val * h[part]
            sums[t] = sums[t] + val * count
    means = {t: v / res.admissible for t, v in sums.items()}
    extra = {key: Fraction(v, res.admissible) for key, v in res.extra.items()}
    return EmpiricalReport(family.family, family.q, d, N, k, res.mode, res.seed, res.admissible, res.scanned,
                           means, extra)


def ff_empirical_mgf_ghost1(family, d, k: int = 1, N: int = 3, samples: int | None = None, seed: int = 0,
                            power_free: str = "ell", workers: int = 1) -> EmpiricalReport:
    """Empirical E[h_tau(X_d)] at ghost index 1 for |tau| <= N over the admissible forms of degree d."""
    if k != 1:
        raise ValueError("the enumeration harness works over the prime field (k = 1)")
    res = ff_scan(family, d, N, samples, seed, power_free=power_free, workers=workers, cells=False)
    return _report(family, d, N, k, res)


def _jet_orbits(scanner) -> list[int] | None:
    """Orbit label of every jet cell under the scanner's symmetry generators (one point of B' only)."""
    gens = scanner.symmetries() if len(scanner.bprime) == 1 else []
    ncell = scanner.p**scanner.jet_len
    parent = list(range(ncell))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in gens:
        for c, img in enumerate(perm):
            ra, rb = find(c), find(img)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return [find(c) for c in range(ncell)]


def total_variation(res: ScanResult, symmetrize: bool | None = None) -> float:
    """TV distance between the jet-cell distribution and the uniform measure on the admissible cells.

    With ``symmetrize`` the empirical measure is first averaged over the orbits of
    the family's exact symmetry group (bijections of the admissible set that
    permute jet cells), which removes most of the sampling noise of Monte Carlo
    runs; the true measure is invariant, so exhaustive runs give the same value
    either way.  The default symmetrizes Monte Carlo runs only.
    """
    scanner = res.scanner
    if symmetrize is None:
        symmetrize = res.mode == "monte_carlo"
    local = scanner.local_cells
    npts = len(scanner.bprime)
    base = scanner.p**scanner.jet_len
    allowed = set()
    for combo in itertools.product(local, repeat=npts):
        allowed.add(sum(c * base**i for i, c in enumerate(combo)))
    u = 1 / len(allowed)
    n = res.cells.sum()
    if n == 0:
        raise ValueError("no admissible samples")
    counts = res.cells.astype(float)
    if symmetrize:
        labels = _jet_orbits(scanner)
        if labels is not None and npts == 1:
            labels = np.array(labels)
            totals = np.bincount(labels, weights=counts, minlength=len(labels))
            sizes = np.bincount(labels, minlength=len(labels))
            counts = totals[labels] / sizes[labels]
    tv = 0.0
    for c, cnt in enumerate(counts):
        emp = cnt / n
        tv += abs(emp - u) if c in allowed else emp
    return tv / 2


def ff_empirical_equidistribution(family, d, Bprime=None, k: int = 1, samples: int | None = None, seed: int = 0,
                                  power_free: str = "ell", symmetrize: bool | None = None) -> float:
    """TV distance between the pushforward of the uniform measure on admissible forms under the jet map
    at the rational points Bprime (affine coordinates; default the origin) and the uniform measure."""
    if k != 1:
        raise ValueError("the enumeration harness works over the prime field (k = 1)")
    res = ff_scan(family, d, 1, samples, seed, bprime=Bprime, power_free=power_free)
    return total_variation(res, symmetrize)


def ff_transversality_filter(family, forms, power_free: str = "ell", cap: int | None = None) -> bool:
    """Admissibility of one candidate: a coefficient vector, a Form, or a pair of Forms for CI families."""
    if isinstance(forms, Form):
        row = list(forms.coeffs)
        d = forms.d
    elif isinstance(forms, (tuple, list)) and forms and isinstance(forms[0], Form):
        row = [c for f in forms for c in f.coeffs]
        d = tuple(f.d for f in forms)
    else:
        raise TypeError("pass a Form or a sequence of Forms")
    if family.family == "character":
        if row[-1] % family.q != 1:
            raise ValueError("character family candidates are monic")
        d = len(row) - 1
        row = row[:-1]
    scanner = _scanner_for(family, d, 1, None, power_free, cap)
    adm, _, _ = scanner.scan(np.array([row], dtype=np.int64) % family.q)
    return bool(adm[0])


# ---------------------------------------------------------------------------
# Hirzebruch germ census


def ff_hirzebruch_census(q: int, k: int = 1) -> tuple[int, int, int, int]:
    """Classify pairs (g, g1) of binary quadratic forms over F_{q^k}.

    g = 0 is excluded.  If g has a single rational root R (a double root) the
    pair is admissible iff g1(R) != 0 (case 1); two rational roots is case 2;
    no rational root is case 3.  Returns (n1, n2, n3, total).
    """
    if q ** (6 * k) > EXHAUSTIVE_LIMIT:
        raise ValueError("census exceeds the exhaustive budget")
    F = gf(q, k)
    Q = F.Q
    forms = _all_rows(Q, 3, 0, Q**3)  # (a, b, c) <-> a x^2 + b x y + c y^2
    pts = np.array([[1, t] for t in range(Q)] + [[0, 1]], dtype=np.int64)
    x, y = pts[:, 0], pts[:, 1]
    mons = np.stack([F.mul(x, x), F.mul(x, y), F.mul(y, y)], axis=1)  # (Q+1, 3)

    def evaluate(coeffs):  # (R, 3) x (P, 3) -> (R, P)
        acc = np.zeros((len(coeffs), len(pts)), dtype=np.int64)
        for i in range(3):
            acc = F.add(acc, F.mul(coeffs[:, i][:, None], mons[:, i][None, :]))
        return acc

    roots = evaluate(forms) == 0
    nroots = roots.sum(axis=1)
    g1_vals = evaluate(forms)  # g1 ranges over the same set of triples
    n1 = n2 = n3 = 0
    for i in range(1, len(forms)):  # index 0 is the zero form
        if nroots[i] == 1:
            R = int(np.argmax(roots[i]))
            n1 += int(np.count_nonzero(g1_vals[:, R]))
        elif nroots[i] == 2:
            n2 += Q**3
        elif nroots[i] == 0:
            n3 += Q**3
        else:  # pragma: no cover - a nonzero quadratic has at most two roots
            raise AssertionError("quadratic with more than two roots")
    return n1, n2, n3, n1 + n2 + n3
