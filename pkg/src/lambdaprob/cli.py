"""Command-line harness: theory tables, simulations, comparisons and the identity self-test.

Configuration is a flat ``key = value`` file; command-line flags override it.
Every report starts with the resolved configuration and a schema version, and
identical configurations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import RATIONAL, Scalar
from .symfun import partition_str, partitions_upto, sf_to_basis

SCHEMA_VERSION = 1

_INT_KEYS = ("q", "ell", "n", "m", "r", "N", "K", "degree_cap", "samples", "seed")
_STR_KEYS = ("family", "format", "out", "fraction", "power_free", "d", "cohomology")
_DEFAULTS = {
    "family": None,
    "q": None,
    "ell": 1,
    "n": 1,
    "m": None,
    "r": 1,
    "d": None,
    "N": 4,
    "K": 4,
    "degree_cap": None,
    "samples": None,
    "seed": 0,
    "format": "csv",
    "out": None,
    "fraction": "census",
    "power_free": "ell",
    "cohomology": None,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def resolved(self) -> dict:
        """The configuration echoed into report headers (output path excluded)."""
        return {k: self.values[k] for k in sorted(self.values) if k != "out"}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment.  Unknown or repeated keys are errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: key {key!r} given twice")
        out[key] = _coerce(key, value)
    return out


def _coerce(key: str, value):
    if value is None:
        return None
    if key in _INT_KEYS:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    return str(value)


def build_config(args: argparse.Namespace) -> RunConfig:
    values = dict(_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    for key in ("N", "K", "seed", "format", "out"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = _coerce(key, v)
    if getattr(args, "exhaustive", False):
        values["samples"] = None
    elif getattr(args, "samples", None) is not None:
        values["samples"] = int(args.samples)
    if values["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    return RunConfig(args.command, values)


# ---------------------------------------------------------------------------
# family specification from a configuration


def family_spec(cfg: RunConfig):
    from .mep import FamilySpec
    from .witt import WittVec

    fam = cfg["family"]
    if fam is None or cfg["q"] is None:
        raise ConfigError("family and q are required")
    n = cfg["n"]
    r = cfg["r"]
    m = cfg["m"] if cfg["m"] is not None else max(n - r, 0)
    spec = FamilySpec(family=fam, q=cfg["q"], ell=cfg["ell"], m=m, r=r, n=n, N=cfg["N"], K=cfg["K"],
                      fraction=cfg["fraction"])
    if cfg["cohomology"]:
        P = spec.working_precision
        tw = spec.tower()
        entries = [int(x) for x in cfg["cohomology"].split(",")]
        spec.cohomology = [WittVec.teichmuller(c, P, tw) if c else WittVec.zero(P, tw) for c in entries]
    return spec


def parse_degree(text):
    if text is None:
        raise ConfigError("d is required for simulations")
    parts = [int(x) for x in str(text).split(",")]
    return parts[0] if len(parts) == 1 else tuple(parts)


# ---------------------------------------------------------------------------
# tables


def _decimal(x) -> str:
    if isinstance(x, Scalar):
        z = x.to_complex()
    elif isinstance(x, Fraction):
        z = complex(float(x))
    else:
        z = complex(x)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z.real)):
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def theory_rows(cfg: RunConfig) -> list[dict]:
    from .mep import mep_family

    spec = family_spec(cfg)
    F = mep_family(spec)
    table = sf_to_basis(F, "m")
    rows = []
    for tau in partitions_upto(spec.N):
        w = table.get(tau)
        for k in range(1, spec.K + 1):
            val = w.ghost[k - 1] if w is not None else F.tower.zero()
            rows.append({"partition": partition_str(tau) if tau else "0", "ghost_k": k,
                         "value_exact": str(val), "value_decimal": _decimal(val)})
    return rows


def theory_table_ghost1(cfg: RunConfig) -> dict:
    from .mep import mep_family

    spec = family_spec(cfg)
    table = sf_to_basis(mep_family(spec), "m")
    return {tau: table[tau].ghost[0] if tau in table else RATIONAL.zero() for tau in partitions_upto(spec.N)}


def simulate(cfg: RunConfig):
    from .ffenum import _report, ff_scan, total_variation

    spec = family_spec(cfg)
    d = parse_degree(cfg["d"])
    res = ff_scan(spec, d, spec.N, cfg["samples"], cfg["seed"], power_free=cfg["power_free"],
                  cap=cfg["degree_cap"])
    report = _report(spec, d, spec.N, 1, res)
    summary = {
        "mode": report.mode,
        "admissible": report.samples,
        "scanned": report.scanned,
        "tv_distance": f"{total_variation(res):.12g}",
    }
    for key, v in sorted(report.extra.items()):
        summary[key] = str(v)
    return report, summary


def simulate_rows(report) -> list[dict]:
    rows = []
    for tau in partitions_upto(report.N):
        v = report.means[tau]
        rows.append({"partition": partition_str(tau) if tau else "0", "ghost_k": 1,
                     "value_exact": str(v), "value_decimal": _decimal(v)})
    return rows


def compare_rows(theory: dict, empirical: dict) -> tuple[list[dict], float]:
    rows = []
    worst = 0.0
    for tau in sorted(set(theory) | set(empirical), key=lambda t: (sum(t), [-x for x in t])):
        t = theory.get(tau, RATIONAL.zero())
        e = empirical.get(tau, RATIONAL.zero())
        dev = abs(t.to_complex() - e.to_complex())
        worst = max(worst, dev)
        rows.append({"partition": partition_str(tau) if tau else "0", "ghost_k": 1,
                     "value_exact": str(e), "value_decimal": _decimal(e),
                     "theory": str(t), "empirical": str(e), "abs_dev": f"{dev:.12g}"})
    return rows, worst


# ---------------------------------------------------------------------------
# self-test


def _selftest_checks(seed: int) -> list[tuple[str, object]]:
    from .cfun import OrbitFunction, value_adams
    from .ffenum import ff_hirzebruch_census
    from .mep import (FamilySpec, ci_lfunction_via_transform, hirzebruch_case_counts, mep_family_ci_lfunction,
                      mep_ghost_classical, mep_product)
    from .symfun import (SymSeries, sf_exp_sigma, sf_ghost_slice, sf_log_sigma, sf_negate_distribution,
                         sf_power)
    from .witt import WittVec
    from .zset import ZSet, zs_class, zs_projective_space

    rng = random.Random(seed)

    def rand_series(N, K, constant_one=False):
        coeffs = {}
        for tau in partitions_upto(N):
            if not tau:
                continue
            if rng.random() < 0.5:
                prec = SymSeries.zero(N, K).prec(sum(tau))
                coeffs[tau] = WittVec([Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(prec)])
        F = SymSeries(coeffs, N, K)
        return SymSeries.one(N, K) + F if constant_one else F

    def exp_log():
        F = rand_series(4, 4)
        return sf_log_sigma(sf_exp_sigma(F)) == F

    def exp_hom():
        F, G = rand_series(4, 4), rand_series(4, 4)
        return sf_exp_sigma(F + G) == sf_exp_sigma(F) * sf_exp_sigma(G)

    def negation():
        from .symfun import SymFunc
        F = SymSeries.from_symfunc(SymFunc.p(1), 4, 4)
        return sf_negate_distribution(sf_exp_sigma(F)) == sf_exp_sigma(-F)

    def classical():
        V = ZSet([("a", 1), ("b", 2), ("c", 3)])
        H = OrbitFunction(V, {k: rand_series(3, 3, True) for k in V.keys()})
        ref = sf_ghost_slice(mep_product(V, H), 2)
        return ref == mep_ghost_classical(V, H, 2, "extended") == mep_ghost_classical(V, H, 2, "gcd")

    def constant_power():
        V = ZSet([("a", 1), ("b", 2)])
        H = rand_series(3, 3, True)
        pulled = OrbitFunction.uniform(V, lambda d: value_adams(d, H))
        lhs = mep_product(V, pulled)
        return lhs == sf_power(H, zs_class(V, 9)).with_budget(lhs.N, lhs.K)

    def census():
        return ff_hirzebruch_census(2) == hirzebruch_case_counts(2)

    def transform():
        spec = FamilySpec("ci_lfunction", q=9, m=1, r=1, n=2, N=3, K=3)
        return mep_family_ci_lfunction(spec) == ci_lfunction_via_transform(spec)

    def point_counts():
        return zs_projective_space(2, 1, 4).counts() == [(1, 3), (2, 1), (3, 2), (4, 3)]

    return [
        ("exp_log_round_trip", exp_log),
        ("exp_homomorphism", exp_hom),
        ("negation_transform", negation),
        ("classical_euler_products", classical),
        ("constant_euler_product", constant_power),
        ("hirzebruch_census", census),
        ("ci_lfunction_transform", transform),
        ("projective_line_orbits", point_counts),
    ]


def selftest_rows(seed: int) -> tuple[list[dict], bool]:
    rows, ok = [], True
    for name, check in _selftest_checks(seed):
        try:
            passed = bool(check())
        except Exception as exc:  # a crashing property is a failing property
            passed = False
            name = f"{name} ({type(exc).__name__})"
        ok &= passed
        rows.append({"property": name, "status": "pass" if passed else "fail"})
    return rows, ok


# ---------------------------------------------------------------------------
# output


_QUOTED = ("value_exact", "theory", "empirical")


def _csv_field(name: str, value) -> str:
    text = "" if value is None else str(value)
    if name in _QUOTED or any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def render(cfg: RunConfig, rows: list[dict], summary: dict | None = None) -> str:
    """Report text; exact values are always quoted in CSV so they stay strings."""
    header = {"schema_version": SCHEMA_VERSION, "command": cfg.command, **cfg.resolved()}
    if cfg["format"] == "json":
        doc = {"header": header, "summary": summary or {}, "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    lines = [f"# {k}={'' if v is None else v}" for k, v in header.items()]
    lines += [f"# summary.{k}={v}" for k, v in (summary or {}).items()]
    if rows:
        cols = list(rows[0])
        lines.append(",".join(cols))
        lines += [",".join(_csv_field(c, row[c]) for c in cols) for row in rows]
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, report text)."""
    summary = None
    status = 0
    if cfg.command == "theory":
        rows = theory_rows(cfg)
    elif cfg.command == "simulate":
        report, summary = simulate(cfg)
        rows = simulate_rows(report)
    elif cfg.command == "compare":
        report, summary = simulate(cfg)
        theory = theory_table_ghost1(cfg)
        rows, worst = compare_rows(theory, report.means)
        summary["max_abs_dev"] = f"{worst:.12g}"
    elif cfg.command == "selftest":
        rows, ok = selftest_rows(cfg["seed"])
        status = 0 if ok else 1
    else:  # pragma: no cover - argparse restricts the choices
        raise ConfigError(f"unknown command {cfg.command!r}")
    return status, render(cfg, rows, summary)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambdaprob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("theory", "closed-form sigma-moment table of a family"),
        ("simulate", "empirical table from finite-field enumeration"),
        ("compare", "theory and empirical tables side by side"),
        ("selftest", "run the identity checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--N", type=int, help="symmetric-function degree cap")
        p.add_argument("--K", type=int, help="number of ghost components")
        p.add_argument("--seed", type=int)
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--exhaustive", action="store_true", help="enumerate every candidate")
        mode.add_argument("--samples", type=int, metavar="COUNT", help="Monte Carlo sample count")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        status, text = run(cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
