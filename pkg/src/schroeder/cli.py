"""Command line interface: ``schroeder <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import bracketings as br
from .analytics import characteristic
from .counting import (
    enumerate_trees,
    exact_leaf_profile,
    exact_node_profile_expectation,
    exact_sum_leaf_heights_expectation,
    exact_leaf_profile_expectation,
    family_count,
)
from .experiments import load_tolerances, run_expected_height, run_height_profile, run_rayleigh
from .measures import family_offspring
from .samplers import RngStream, sample_family
from .trees import from_json, to_json
from .weights import FAMILIES, family

KINDS = {k.value: k for k in br.BracketingKind}
DEFAULT_KIND = {"P1": "word-binary", "P2": "word-general", "P3": "set-binary", "P4": "set-general"}


def _ratio(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _read(text: str) -> str:
    return sys.stdin.read().strip() if text == "-" else text


def cmd_parse(a) -> int:
    print(to_json(br.parse(_read(a.text), KINDS[a.kind])))
    return 0


def cmd_serialize(a) -> int:
    print(br.serialize(from_json(_read(a.json)), KINDS[a.kind]))
    return 0


def cmd_count(a) -> int:
    for n in range(1, a.n + 1):
        print(family_count(a.family, n))
    return 0


def cmd_enumerate(a) -> int:
    for t in enumerate_trees(a.family, a.n):
        print(to_json(t))
    return 0


def cmd_exact_stats(a) -> int:
    ws = family(a.family).weights
    if a.stat == "sum-heights":
        print(_ratio(exact_sum_leaf_heights_expectation(ws, a.n)))
        return 0
    if a.k is not None:
        fn = exact_leaf_profile_expectation if a.stat == "leaf-profile" else exact_node_profile_expectation
        print(_ratio(fn(ws, a.n, a.k)))
        return 0
    values = exact_leaf_profile(ws, a.n) if a.stat == "leaf-profile" else [
        exact_node_profile_expectation(ws, a.n, k) for k in range(a.n)
    ]
    for k, v in enumerate(values):
        print(k, _ratio(v))
    return 0


def _digits(x) -> str:
    return mpmath.nstr(x, 30, strip_zeros=False)


def cmd_constants(a) -> int:
    f = family(a.family)
    if a.json:
        sol = characteristic(f)
        print(json.dumps({k: _digits(v) for k, v in sol.as_dict().items()}, indent=2))
        return 0
    xi = family_offspring(f)
    top = xi.support_max if xi.support_max is not None else a.terms - 1
    for i in range(top + 1):
        print(f"xi_{i} = {_ratio(xi.exact[i]) if xi.exact else _digits(xi[i])}")
    if xi.support_max is None:
        print("...")
    print(f"mean = {_digits(xi.mean)}")
    print(f"variance = {_digits(xi.variance)}")
    return 0


def cmd_sample(a) -> int:
    f = family(a.family)
    kind = KINDS[DEFAULT_KIND.get(f.name, "set-general" if f.labeled else "word-general")]
    for i in range(a.count):
        t = sample_family(f, a.n, RngStream(a.seed, i), a.method)
        print(br.serialize(t, kind) if a.format == "bracketing" else to_json(t))
    return 0


def cmd_experiment(a) -> int:
    tol = load_tolerances(a.config)
    if a.kind == "rayleigh":
        rep = run_rayleigh(a.family, a.n, a.reps, a.seed, tol)
    elif a.kind == "height":
        rep = run_expected_height(a.family, a.n, a.reps, a.seed, tol)
    else:
        rep = run_height_profile(a.family, a.n, a.kmax, a.reps, a.seed, tol)
    if a.out:
        out = Path(a.out)
        out.write_text(rep.to_csv() if out.suffix.lower() == ".csv" else rep.to_json())
    else:
        sys.stdout.write(rep.to_json())
    for r in rep.rows:
        flag = "info" if r.passed is None else ("PASS" if r.passed else "FAIL")
        k = "" if r.k is None else f"[k={r.k}]"
        print(f"{flag} {r.statistic}{k} observed={r.observed:.6g} reference={r.reference:.6g} "
              f"{r.metric_name}={r.metric:.4g}", file=sys.stderr)
    return 0 if rep.passed else 1


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schroeder", description="Bracketings, tree counts, samplers and limit-law checks.")
    sub = p.add_subparsers(dest="command", required=True)
    fam = dict(choices=sorted(FAMILIES), required=True)

    s = sub.add_parser("parse", help="bracketing string -> JSON tree")
    s.add_argument("--kind", choices=sorted(KINDS), required=True)
    s.add_argument("text", help="bracketing, or - for stdin")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("serialize", help="JSON tree -> bracketing string")
    s.add_argument("--kind", choices=sorted(KINDS), required=True)
    s.add_argument("json", help="JSON tree, or - for stdin")
    s.set_defaults(func=cmd_serialize)

    s = sub.add_parser("count", help="exact counts for sizes 1..N, one per line")
    s.add_argument("--family", **fam)
    s.add_argument("--n", type=_positive, required=True)
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("enumerate", help="all trees of one size as JSON lines")
    s.add_argument("--family", **fam)
    s.add_argument("--n", type=_positive, required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("exact-stats", help="exact expectations as p/q")
    s.add_argument("--family", **fam)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--stat", choices=["leaf-profile", "node-profile", "sum-heights"], required=True)
    s.add_argument("--k", type=int, help="single height (profiles); default prints k = 0..n-1")
    s.set_defaults(func=cmd_exact_stats)

    s = sub.add_parser("constants", help="offspring law, or singularity constants with --json")
    s.add_argument("--family", **fam)
    s.add_argument("--json", action="store_true")
    s.add_argument("--terms", type=_positive, default=10, help="terms shown for infinite support")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("sample", help="random trees, one per line")
    s.add_argument("--family", **fam)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--count", type=_positive, default=1)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--method", choices=["counting", "gw"], default="counting")
    s.add_argument("--format", choices=["json", "bracketing"], default="json")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("experiment", help="Monte Carlo check against limit laws and exact values")
    s.add_argument("kind", choices=["rayleigh", "height", "profile"])
    s.add_argument("--family", **fam)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--reps", type=_positive, default=1000)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--kmax", type=int, default=5)
    s.add_argument("--out", help="report path; .csv selects CSV, anything else JSON")
    s.add_argument("--config", help="tolerance file with key = value lines")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
