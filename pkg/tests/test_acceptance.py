"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (printed in the terminal summary)
and then asserts. Tolerances are the stated ones; nothing is loosened.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from fractions import Fraction

import mpmath
from scipy import stats

from conftest import criterion
from schroeder.analytics import asymptotic_count_ratio, characteristic, solve_characteristic
from schroeder.bracketings import BracketingKind as K, parse, serialize
from schroeder.counting import (
    enumerate_trees,
    enumeration_average,
    exact_leaf_profile_expectation,
    exact_node_profile_expectation,
    exact_sum_leaf_heights_expectation,
    family_count,
    ordered_label_identity_check,
)
from schroeder.experiments import Tolerances, run_expected_height, run_height_profile, run_rayleigh
from schroeder.measures import (
    family_offspring,
    gibbs_from_weights,
    gibbs_tree_probability,
    q_probability,
    uniform_ordered_offspring,
)
from schroeder.samplers import RngStream, sample_family
from schroeder.trees import to_json, tree_statistics
from schroeder.weights import P1, P2, P3, P4

FAMILIES = (P1, P2, P3, P4)
KIND = {"P1": K.WORD_BINARY, "P2": K.WORD_GENERAL, "P3": K.SET_BINARY, "P4": K.SET_GENERAL}
ALPHA = 1e-3
SEED = 20261016
TOL = Tolerances()


def _ok(checks):
    bad = [c for c in checks if not c[1]]
    assert not bad, bad


def test_criterion_01_exact_counts():
    with criterion("01 exact counts = brute-force enumeration, n <= 7") as checks:
        t0 = time.time()
        for f in FAMILIES:
            for n in range(1, 8):
                c, e = family_count(f, n), len(enumerate_trees(f, n))
                checks.append((f"{f.name} n={n}", c == e, f"{c} vs {e}"))
        for name, n, want in (("P1", 4, 5), ("P3", 4, 15), ("P4", 3, 4)):
            got = family_count(name, n)
            checks.append((f"anchor {name} n={n}", got == want, f"{got}"))
        dt = time.time() - t0
        checks.append(("runtime < 60 s", dt < 60, f"{dt:.1f} s"))
    _ok(checks)


def test_criterion_02_round_trip():
    with criterion("02 parse(serialize(t)) = t on every enumerated tree, n <= 6") as checks:
        t0 = time.time()
        for f in FAMILIES:
            trees = [t for n in range(1, 7) for t in enumerate_trees(f, n)]
            bad = sum(parse(serialize(t, KIND[f.name]), KIND[f.name]) != t for t in trees)
            checks.append((f.name, bad == 0, f"{len(trees)} trees, {bad} mismatches"))
        dt = time.time() - t0
        checks.append(("runtime < 60 s", dt < 60, f"{dt:.1f} s"))
    _ok(checks)


def test_criterion_03_tilting():
    with criterion("03 tilting by (2, 1/2) leaves Q_n unchanged exactly, n <= 6") as checks:
        for f in FAMILIES:
            tw = f.weights.tilt(2, Fraction(1, 2))
            bad = total = 0
            for n in range(1, 7):
                for t in enumerate_trees(f, n):
                    total += 1
                    bad += q_probability(tw, t) != q_probability(f.weights, t)
            checks.append((f.name, bad == 0, f"{total} trees, {bad} differ"))
    _ok(checks)


def test_criterion_04_characteristic_system():
    with criterion("04 characteristic system and the uniform-ordered offspring law") as checks:
        t0 = time.time()
        with mpmath.workdps(50):
            l2 = mpmath.log(2)
            r, s = solve_characteristic(P3.weights)
            checks.append(("P3 (r,s) = (1/2,1)", abs(r - 0.5) < 1e-10 and abs(s - 1) < 1e-10, f"({mpmath.nstr(r, 15)}, {mpmath.nstr(s, 15)})"))
            r, s = solve_characteristic(P4.weights)
            ok = abs(r - (2 * l2 - 1)) < 1e-10 and abs(s - l2) < 1e-10
            checks.append(("P4 (r,s) = (2log2-1,log2)", ok, f"({mpmath.nstr(r, 15)}, {mpmath.nstr(s, 15)})"))
            xi = uniform_ordered_offspring()
            checks.append(("xi^u_0 = 0.5858", abs(xi[0] - mpmath.mpf("0.5858")) < 5e-5, mpmath.nstr(xi[0], 10)))
            checks.append(("xi^u_2 = 0.2929", abs(xi[2] - mpmath.mpf("0.2929")) < 5e-5, mpmath.nstr(xi[2], 10)))
            checks.append(("xi^u mean = 1", abs(xi.mean - 1) < 1e-10, mpmath.nstr(xi.mean, 15)))
            target = 4 * mpmath.sqrt(2)
            checks.append(
                ("xi^u variance = 4 sqrt 2", abs(xi.variance - target) < 1e-10, f"computed {mpmath.nstr(xi.variance, 15)} vs {mpmath.nstr(target, 15)}")
            )
        dt = time.time() - t0
        checks.append(("runtime < 1 s", dt < 1, f"{dt:.2f} s"))
    _ok(checks)


def test_criterion_05_scaling_constants():
    with criterion("05 2/(sigma sqrt xi_0) matches the closed forms for all four families") as checks:
        t0 = time.time()
        with mpmath.workdps(50):
            sq2 = mpmath.sqrt(2)
            closed = {
                "P1": 2 * sq2,
                "P2": sq2 / (2 * mpmath.sqrt(sq2 - 1)),
                "P3": 2 * sq2,
                "P4": 2 / mpmath.sqrt(4 * mpmath.log(2) - 2),
            }
            for f in FAMILIES:
                got = characteristic(f).scaling_const
                want = closed[f.name]
                checks.append((f.name, abs(got - want) < 1e-10, f"computed {mpmath.nstr(got, 15)} vs {mpmath.nstr(want, 15)}"))
        dt = time.time() - t0
        checks.append(("runtime < 1 s", dt < 1, f"{dt:.2f} s"))
    _ok(checks)


def test_criterion_06_gibbs():
    with criterion("06 Gibbs model: Z(n) = g(n), n <= 8, and split products = Q_n, n <= 5") as checks:
        model = gibbs_from_weights(P4.weights, 8)
        for n in range(2, 9):
            checks.append((f"Z({n}) = g({n})", model.Z[n] == model.g[n], f"{model.Z[n]} vs {model.g[n]}"))
        bad = total = 0
        for n in range(1, 6):
            for t in enumerate_trees(P4, n):
                total += 1
                bad += gibbs_tree_probability(model, t) != q_probability(P4.weights, t)
        checks.append(("tree probabilities", bad == 0, f"{total} trees, {bad} differ"))
    _ok(checks)


def _key(t) -> str:
    return to_json(t)


def test_criterion_07_sampler_exactness():
    with criterion("07 chi-square: counting sampler uniform (n <= 5, 2e5 draws); GW vs counting at n = 6 (1e5 each)") as checks:
        t0 = time.time()
        for f in FAMILIES:
            for n in range(1, 6):
                support = {_key(t) for t in enumerate_trees(f, n)}
                rng = RngStream(SEED, 100 * n)
                draws = Counter(_key(sample_family(f, n, rng)) for _ in range(200000))
                inside = set(draws) <= support
                if len(support) == 1:
                    checks.append((f"{f.name} n={n}", inside, "single tree"))
                    continue
                obs = [draws[k] for k in sorted(support)]
                p = stats.chisquare(obs).pvalue
                checks.append((f"{f.name} n={n}", inside and p > ALPHA, f"p={p:.3g}"))
            rng_c, rng_g = RngStream(SEED, 600), RngStream(SEED, 601)
            a = Counter(_key(sample_family(f, 6, rng_c)) for _ in range(100000))
            b = Counter(_key(sample_family(f, 6, rng_g, "gw")) for _ in range(100000))
            keys = sorted(set(a) | set(b))
            p = stats.chi2_contingency([[a[k] for k in keys], [b[k] for k in keys]]).pvalue
            checks.append((f"{f.name} GW vs counting n=6", p > ALPHA and len(keys) == family_count(f, 6), f"p={p:.3g}, {len(keys)} trees"))
        dt = time.time() - t0
        checks.append(("runtime < 10 min", dt < 600, f"{dt:.0f} s"))
    _ok(checks)


def test_criterion_08_ordered_label_identity():
    with criterion("08 #ordered x #labelings = prod deg! for every general labeled tree, n <= 5") as checks:
        for n in range(1, 6):
            checks.append((f"n={n}", ordered_label_identity_check(n), f"{family_count(P4, n)} labeled trees"))
    _ok(checks)


def test_criterion_09_count_asymptotics():
    with criterion("09 |[z^n]C / asymptote - 1| <= 0.02 (P1,P3 at 400; P2,P4 at 200)") as checks:
        t0 = time.time()
        for f, n in ((P1, 400), (P3, 400), (P2, 200), (P4, 200)):
            ratio = asymptotic_count_ratio(f, n)
            checks.append((f"{f.name} n={n}", abs(ratio - 1) <= 0.02, f"ratio {mpmath.nstr(ratio, 8)}"))
        dt = time.time() - t0
        checks.append(("runtime < 60 s", dt < 60, f"{dt:.1f} s"))
    _ok(checks)


def test_criterion_10_rayleigh():
    with criterion("10 KS(lambda H_n / sqrt n, Rayleigh(1)) <= 0.03 at n = 2000, N = 2e4") as checks:
        for f in (P3, P4):
            rep = run_rayleigh(f, 2000, 20000, SEED, TOL)
            d = rep.rows[0].metric
            checks.append((f.name, d <= TOL.rayleigh_ks, f"KS={d:.4f}"))
    _ok(checks)


def test_criterion_11_expected_height():
    with criterion("11 mean leaf height within 5% of heightConst sqrt n (n = 5000, N = 1e4); exact values within 3 SE (n <= 30)") as checks:
        for f in (P3, P4):
            rep = run_expected_height(f, 5000, 10000, SEED, TOL)
            row = rep.rows[0]
            checks.append((f"{f.name} n=5000", row.passed, f"mean {row.observed:.3f} vs {row.reference:.3f}, rel {row.metric:.4f}"))
            for n in (3, 8, 30):
                rep = run_expected_height(f, n, 10000, SEED, TOL)
                row = [r for r in rep.rows if r.statistic == "mean_height_exact"][0]
                checks.append((f"{f.name} n={n} exact", row.passed, f"{row.observed:.4f} vs {row.reference:.4f}, {row.metric:.2f} SE"))
    _ok(checks)


def test_criterion_12_height_profiles():
    with criterion("12 leaf/vertex counts at k <= 5 within 5% of the linear limits (n = 5000); exact values within 3 SE (n <= 30)") as checks:
        for f in (P3, P4):
            rep = run_height_profile(f, 5000, 5, 5000, SEED, TOL)
            for row in rep.rows:
                if row.passed is None:
                    continue
                checks.append((f"{f.name} {row.statistic} k={row.k}", row.passed, f"{row.observed:.4f} vs {row.reference:.4f}, rel {row.metric:.4f}"))
            for n in (10, 30):
                rep = run_height_profile(f, n, 5, 10000, SEED, TOL)
                for row in rep.rows:
                    if row.statistic.endswith("_exact"):
                        checks.append((f"{f.name} n={n} {row.statistic} k={row.k}", row.passed, f"{row.metric:.2f} SE"))
    _ok(checks)


def test_criterion_13_series_oracle():
    with criterion("13 series expectations = enumeration averages as exact rationals, n <= 6") as checks:
        t0 = time.time()
        for f in FAMILIES:
            bad = total = 0
            for n in range(1, 7):
                stats_by_tree = [(q_probability(f.weights, t), tree_statistics(t)) for t in enumerate_trees(f, n)]

                def avg(fn):
                    return sum((p * fn(s) for p, s in stats_by_tree), Fraction(0))

                pairs = [(exact_sum_leaf_heights_expectation(f, n), avg(lambda s: s.sum_leaf_heights))]
                for k in range(n + 1):
                    pairs.append((exact_leaf_profile_expectation(f, n, k), avg(lambda s: s.leaves_at_height.get(k, 0))))
                    pairs.append((exact_node_profile_expectation(f, n, k), avg(lambda s: s.nodes_at_height.get(k, 0))))
                total += len(pairs)
                bad += sum(a != b for a, b in pairs)
            checks.append((f.name, bad == 0, f"{total} identities, {bad} differ"))
        helper = enumeration_average(P4, 6, lambda t: tree_statistics(t).sum_leaf_heights)
        series = exact_sum_leaf_heights_expectation(P4, 6)
        checks.append(("enumeration_average P4 n=6", helper == series, f"{helper} vs {series}"))
        dt = time.time() - t0
        checks.append(("runtime < 60 s", dt < 60, f"{dt:.1f} s"))
    _ok(checks)
