"""Motivic Euler products and the closed-form sigma-moment generating functions of the families.

Every family MGF is assembled from a Witt-valued success parameter ``p`` and an
exponent ``[Y]`` through pre-lambda powers.  Closed-form Witt inputs are built
at the working precision ``K * N`` so that the output keeps ``K`` exact ghost
components in every coefficient of degree at most ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .cfun import OrbitFunction, cf_integrate, cf_restrict, value_substitute
from .scalars import RATIONAL, Scalar, Tower, tower
from .symfun import (
    ScalarSeries,
    SymFunc,
    SymSeries,
    graded_precision,
    partition_str,
    sf_dilate_m,
    sf_exp_sigma,
    sf_ghost_slice,
    sf_log_sigma,
    sf_negate_distribution,
    sf_power,
    sf_scale_variables,
    sf_to_basis,
)
from .witt import PrecisionError, WittVec, witt_adams
from .zset import ZMap, ZSet, zs_class, zs_extend, zs_projective_space

__all__ = [
    "FamilySpec",
    "mep_product",
    "mep_ghost_classical",
    "mep_binomial",
    "mep_family",
    "mep_family_character",
    "mep_family_smooth_hypersurface",
    "mep_family_exotic",
    "mep_family_ci_zeta",
    "mep_family_ci_lfunction",
    "ci_lfunction_via_transform",
    "ci_mu",
    "ci_success_parameter",
    "mep_family_hirzebruch",
    "mep_reduce_mod_qhalf",
    "character_germ_census",
    "character_printed_fraction",
    "character_fraction_check",
    "hirzebruch_case_counts",
    "linear_independence_probability",
    "projective_space_cohomology",
    "reference_series",
]


# ---------------------------------------------------------------------------
# Euler products


def _sym_value_sum(values: list[SymSeries]) -> SymSeries:
    K = min(v.K for v in values)
    total = None
    for v in values:
        v = v if v.K == K else v.with_budget(v.N, K)
        total = v if total is None else total + v
    return total


def mep_product(M: ZMap | ZSet, H: OrbitFunction):
    """The Euler product Exp_sigma(integral of Log_sigma H) fiberwise over the base.

    With a ZMap the result is a series-valued function on the base; with a finite
    ZSet V (base = one point) it is a single series.
    """
    if isinstance(M, ZSet):
        terms = [value_substitute(d, sf_log_sigma(H(key))) for key, d in M.orbits]
        if not terms:
            raise ValueError("empty product: supply a nonempty Z-set")
        return sf_exp_sigma(_sym_value_sum(terms))
    logH = H.map(sf_log_sigma)
    integral = cf_integrate(M, logH)
    return integral.map(sf_exp_sigma)


def mep_ghost_classical(V: ZSet, H: OrbitFunction, k: int, variant: str = "extended") -> ScalarSeries:
    """k-th ghost slice of the Euler product over V -> 1 as a classical finite product.

    ``extended``: product over orbits |v| of V_k of H(|v|)_1(t^{deg |v|}), with H restricted to V_k.
    ``gcd``: product over orbits |v| of V of (H(|v|)_{k/g}(t^{deg/g}))^g, g = gcd(k, deg |v|).
    Orbits whose dilation exceeds the degree cap contribute 1 and are skipped (locality).
    """
    sample = None
    for key, d in V.iter_orbits(1 if not V.finite else None):
        sample = H(key)
        break
    if sample is None:
        raise ValueError("empty Z-set")
    N, tw = sample.N, sample.tower
    if not V.finite and V.cap < N * k:
        raise PrecisionError(f"classical product at k={k} needs orbits up to degree {N * k}, cap {V.cap}")
    result = ScalarSeries.one(N, tw)
    if variant == "extended":
        if V.finite:
            Hk = cf_restrict(H, k)
            for key, e in zs_extend(V, k).orbits:
                if e <= N:
                    result = result * sf_ghost_slice(Hk(key), 1).dilate(e)
        else:
            for key, d in V.iter_orbits(N * k):
                g = gcd(d, k)
                if d // g > N:
                    continue
                factor = _slice(H(key), k // g).dilate(d // g)
                for _ in range(g):
                    result = result * factor
        return result
    if variant == "gcd":
        for key, d in V.iter_orbits(None if V.finite else N * k):
            g = gcd(d, k)
            if d // g > N:
                continue
            result = result * (_slice(H(key), k // g).dilate(d // g) ** g)
        return result
    raise ValueError(f"unknown variant {variant!r}")


def _slice(F: SymSeries, j: int) -> ScalarSeries:
    """ghost_j of every coefficient (the first ghost of p_j * F)."""
    if j > F.K:
        raise PrecisionError(f"ghost slice {j} beyond K={F.K}")
    return ScalarSeries({lam: w.ghost[j - 1] for lam, w in F.coeffs.items()}, F.N, F.tower)


def mep_binomial(p: WittVec, Nexp: WittVec | SymSeries, N: int, K: int) -> SymSeries:
    """(1 + p (h_1 + h_2 + ...))^Nexp."""
    tw = p.tower
    S = SymFunc({})
    for j in range(1, N + 1):
        S = S + SymFunc.h(j)
    inner = SymSeries.one(N, K, tw) + SymSeries.from_symfunc(S, N, K, tw, coefficient=p)
    return sf_power(inner, Nexp)


# ---------------------------------------------------------------------------
# family specification


@dataclass
class FamilySpec:
    """Parameters of a family MGF.

    ``base`` is the class of Y (a Z-set or a Witt vector); when omitted it defaults
    to projective space of dimension ``n``.  ``cohomology`` lists [H^i(Y)] for the
    L-function family; it defaults to the projective-space table.
    """

    family: str
    q: int
    ell: int = 1
    m: int = 0
    r: int = 1
    n: int = 1
    N: int = 6
    K: int = 6
    base: ZSet | WittVec | None = None
    cohomology: Sequence[WittVec] | None = None
    dim: int | None = None
    fraction: str = "census"

    @property
    def working_precision(self) -> int:
        return graded_precision(self.N, self.K, 0)

    def tower(self) -> Tower:
        if self.family in ("ci_zeta", "ci_lfunction"):
            return tower(1, self.q)
        return RATIONAL

    def base_class(self) -> WittVec:
        P = self.working_precision
        tw = self.tower()
        if self.base is None:
            return zs_class(zs_projective_space(self.q, self.n, P), P, tw)
        if isinstance(self.base, ZSet):
            return zs_class(self.base, P, tw)
        if self.base.prec < P:
            raise PrecisionError(f"base class needs precision {P}, has {self.base.prec}")
        return self.base

    def base_dimension(self) -> int | None:
        if self.dim is not None:
            return self.dim
        return self.n if self.base is None else None


def _teich(z, P: int, tw: Tower) -> WittVec:
    return WittVec.teichmuller(z, P, tw)


# ---------------------------------------------------------------------------
# character family


def character_germ_census(Q: int, ell: int) -> tuple[int, int]:
    """(#germs in O/m^ell with nonzero value, #nonzero germs) over a residue field of size Q."""
    return (Q - 1) * Q ** (ell - 1), Q**ell - 1


def character_printed_fraction(Q: int, ell: int):
    """The alternative fraction (Q^{ell-1} - 1)/(Q^ell - 1), kept only as a cross-check."""
    from fractions import Fraction

    return Fraction(Q ** (ell - 1) - 1, Q**ell - 1)


def character_fraction_check(q: int, ell: int, k: int = 1) -> dict:
    """Compare the census value with the alternative fraction; flags any disagreement."""
    from fractions import Fraction

    fav, tot = character_germ_census(q**k, ell)
    census = Fraction(fav, tot)
    printed = character_printed_fraction(q**k, ell)
    return {"census": census, "printed": printed, "discrepancy": census != printed}


def mep_family_character(spec: FamilySpec) -> SymSeries:
    """(1 + c (h_ell + h_{2 ell} + ...))^{[A^1]} with c_k the non-vanishing germ census at Q = q^k."""
    q, ell, N, K = spec.q, spec.ell, spec.N, spec.K
    if ell < 2 or (q - 1) % ell:
        raise ValueError("character family needs ell >= 2 with ell | q - 1")
    P = spec.working_precision
    tw = spec.tower()
    if spec.fraction == "census":
        c = WittVec.from_function(lambda k: _ratio(*character_germ_census(q**k, ell)), P, tw)
    elif spec.fraction == "printed":
        c = WittVec.from_function(lambda k: character_printed_fraction(q**k, ell), P, tw)
    else:
        raise ValueError(f"unknown fraction convention {spec.fraction!r}")
    S = SymFunc({})
    for j in range(1, N // ell + 1):
        S = S + SymFunc.h(ell * j)
    inner = SymSeries.one(N, K, tw) + SymSeries.from_symfunc(S, N, K, tw, coefficient=c)
    return sf_power(inner, _teich(q, P, tw))


def _ratio(a: int, b: int):
    from gmpy2 import mpq

    return mpq(a, b)


# ---------------------------------------------------------------------------
# transversality families


def mep_family_smooth_hypersurface(spec: FamilySpec) -> SymSeries:
    """Binomial distribution with p = ([q]^ell - 1)/([q]^{ell+1} - 1) and exponent [Y]."""
    q, ell = spec.q, spec.ell
    dim = spec.base_dimension()
    if dim is not None and ell < dim:
        raise ValueError(f"relative dimension ell={ell} must be at least dim Y={dim}")
    P = spec.working_precision
    tw = spec.tower()
    p = WittVec.from_function(lambda k: _ratio(q ** (k * ell) - 1, q ** (k * (ell + 1)) - 1), P, tw)
    return mep_binomial(p, spec.base_class(), spec.N, spec.K)


mep_family_exotic = mep_family_smooth_hypersurface


def linear_independence_probability(a, b: int, c: int):
    """L(a, b, c) = prod_{j<c} (1 - a^{-(b-j)}) for a scalar or Witt vector a."""
    out = None
    for j in range(c):
        term = 1 - a ** (-(b - j))
        out = term if out is None else out * term
    return 1 if out is None else out


def ci_success_parameter(q: int, m: int, r: int, P: int, tw: Tower) -> WittVec:
    """p = [q]^{-r} L / (1 - [q]^{-r} + [q]^{-r} L) with L = L([q], m + r, r)."""
    Q = _teich(q, P, tw)
    L = linear_independence_probability(Q, m + r, r)
    qr = Q ** (-r)
    return qr * L / (1 - qr + qr * L)


def mep_family_ci_zeta(spec: FamilySpec) -> SymSeries:
    if spec.m < 0 or spec.r < 1:
        raise ValueError("complete intersections need m >= 0 and r >= 1")
    P = spec.working_precision
    p = ci_success_parameter(spec.q, spec.m, spec.r, P, spec.tower())
    return mep_binomial(p, spec.base_class(), spec.N, spec.K)


def projective_space_cohomology(q: int, n: int, P: int, tw: Tower = RATIONAL) -> list[WittVec]:
    """[H^i(P^n)] for i = 0..2n: [q^{i/2}] in even degrees, 0 in odd degrees."""
    out = []
    for i in range(2 * n + 1):
        out.append(_teich(q ** (i // 2), P, tw) if i % 2 == 0 else WittVec.zero(P, tw))
    return out


def _half_power(q: int, e: int, P: int, tw: Tower) -> WittVec:
    """[q^{e/2}] for an integer e: ghost_k = s^{e k}."""
    return WittVec._raw(tuple(tw.sqrt_q_power(e * k) for k in range(1, P + 1)), tw)


def _cohomology(spec: FamilySpec) -> list[WittVec]:
    P, tw = spec.working_precision, spec.tower()
    if spec.cohomology is not None:
        coh = list(spec.cohomology)
        if len(coh) <= spec.m:
            raise ValueError(f"need [H^i(Y)] for i <= m = {spec.m}")
        return [c if c.tower is tw else WittVec(tuple(tw(g.to_mpq()) for g in c.ghost), tw) for c in coh]
    return projective_space_cohomology(spec.q, spec.m + spec.r, P, tw)


def ci_mu(spec: FamilySpec) -> WittVec:
    """mu = -eps sum_{i<m} (-1)^i ([q^{-m/2}] + [q^{(m-2i)/2}]) [H^i] - [q^{-m/2}] [H^m]."""
    m, q = spec.m, spec.q
    P, tw = spec.working_precision, spec.tower()
    eps = 1 if m % 2 == 0 else -1
    H = _cohomology(spec)
    qm = _half_power(q, -m, P, tw)
    total = -(qm * H[m])
    for i in range(m):
        term = (qm + _half_power(q, m - 2 * i, P, tw)) * H[i]
        total = total + term.scale(-eps * (-1) ** i)
    return total


def mep_family_ci_lfunction(spec: FamilySpec) -> SymSeries:
    """(1 + p sum_i [q^{-im/2}] eps^i f_i)^{[Y]} Exp_sigma(mu h_1), f = h (m even) or e (m odd)."""
    m, q, N, K = spec.m, spec.q, spec.N, spec.K
    P, tw = spec.working_precision, spec.tower()
    p = ci_success_parameter(q, m, spec.r, P, tw)
    eps = 1 if m % 2 == 0 else -1
    inner = SymSeries.one(N, K, tw)
    for i in range(1, N + 1):
        f_i = SymFunc.h(i) if eps == 1 else SymFunc.e(i)
        coef = p * _half_power(q, -i * m, P, tw)
        inner = inner + SymSeries.from_symfunc(f_i * (eps**i), N, K, tw, coefficient=coef)
    binom = sf_power(inner, spec.base_class())
    mu_term = sf_exp_sigma(SymSeries.from_symfunc(SymFunc.p(1), N, K, tw, coefficient=ci_mu(spec)))
    return binom * mu_term


def ci_lfunction_via_transform(spec: FamilySpec, zeta: SymSeries | None = None) -> SymSeries:
    """Same MGF assembled from the zeta family: scale variables by [q^{-m/2}], negate when m is odd,
    then multiply by Exp_sigma(mu h_1)."""
    P, tw = spec.working_precision, spec.tower()
    if zeta is None:
        zeta = mep_family_ci_zeta(FamilySpec(**{**spec.__dict__, "family": "ci_zeta"}))
    scaled = sf_scale_variables(zeta, _half_power(spec.q, -spec.m, P, tw))
    if spec.m % 2:
        scaled = sf_negate_distribution(scaled)
    mu_term = sf_exp_sigma(SymSeries.from_symfunc(SymFunc.p(1), spec.N, spec.K, tw, coefficient=ci_mu(spec)))
    return scaled * mu_term


# ---------------------------------------------------------------------------
# Hirzebruch surfaces


def hirzebruch_case_counts(Q: int) -> tuple[int, int, int, int]:
    """Germ counts (square, split, irreducible, total) over a residue field of size Q."""
    n1 = (Q**2 - 1) * (Q**3 - Q**2)
    n2 = (Q**2 - 1) * Q**4 // 2
    n3 = (Q - 1) ** 2 * Q**4 // 2
    return n1, n2, n3, n1 + n2 + n3


def mep_family_hirzebruch(spec: FamilySpec) -> SymSeries:
    """F^{[P^1]} with F the census-weighted mixture of S, S^2 and S(t^2), S = sum_{j>=0} h_j."""
    q, N, K = spec.q, spec.N, spec.K
    P, tw = spec.working_precision, spec.tower()
    Q = _teich(q, P, tw)
    S = SymFunc({})
    for j in range(N + 1):
        S = S + SymFunc.h(j)
    S_series = SymSeries.from_symfunc(S, N, K, tw)
    S2 = S_series * S_series
    S_sq_vars = sf_dilate_m(S_series, 2)
    a = (Q**2 - 1) * (Q - 1)
    b = (Q**4 - Q**2).scale(_ratio(1, 2))
    c = ((Q**2 - Q) ** 2).scale(_ratio(1, 2))
    d = Q**4 - Q**2 - Q + 1
    inv = d.inverse()
    F = S_series.scale_witt(a * inv) + S2.scale_witt(b * inv) + S_sq_vars.scale_witt(c * inv)
    return sf_power(F, zs_class(zs_projective_space(q, 1, P), P, tw))


# ---------------------------------------------------------------------------
# dispatch and comparisons


def mep_family(spec: FamilySpec) -> SymSeries:
    fam = spec.family
    if fam == "character":
        return mep_family_character(spec)
    if fam in ("smooth_hypersurface", "exotic"):
        return mep_family_smooth_hypersurface(spec)
    if fam == "ci_zeta":
        return mep_family_ci_zeta(spec)
    if fam == "ci_lfunction":
        return mep_family_ci_lfunction(spec)
    if fam == "hirzebruch":
        return mep_family_hirzebruch(spec)
    raise ValueError(f"unknown family {fam!r}")


def reference_series(kind: str, N: int, K: int, tw: Tower = RATIONAL) -> SymSeries:
    """Random-matrix comparison targets: Exp(h_2), Exp(e_2) or Exp(h_2 + h_3 + ...)."""
    if kind == "h2":
        a = SymFunc.h(2)
    elif kind == "e2":
        a = SymFunc.e(2)
    elif kind == "h2plus":
        a = SymFunc({})
        for j in range(2, N + 1):
            a = a + SymFunc.h(j)
    else:
        raise ValueError(f"unknown reference {kind!r}")
    return sf_exp_sigma(SymSeries.from_symfunc(a, N, K, tw))


def mep_reduce_mod_qhalf(F: SymSeries, reference: SymSeries, q: int, k: int, C: float = 4.0,
                         basis: str = "m") -> dict:
    """Check |ghost_k(F - reference)| <= C q^{-k/2} for every coefficient in ``basis``."""
    if k > min(F.K, reference.K):
        raise PrecisionError(f"k={k} beyond available precision")
    diff = sf_to_basis(F - reference, basis)
    bound = q ** (-k / 2)
    worst, worst_tau = 0.0, None
    for tau, w in diff.items():
        ratio = abs(w.ghost[k - 1].to_complex()) / bound
        if ratio > worst:
            worst, worst_tau = ratio, tau
    return {
        "passed": worst <= C,
        "max_ratio": worst,
        "worst_partition": partition_str(worst_tau) if worst_tau is not None else None,
        "k": k,
        "C": C,
    }
