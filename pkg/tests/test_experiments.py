from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from scipy import stats

from schroeder.analytics import rayleigh_cdf
from schroeder.experiments import (
    Tolerances,
    ks_statistic,
    load_tolerances,
    replicates,
    run_expected_height,
    run_height_profile,
    run_rayleigh,
)


def test_ks_constant_sample():
    assert ks_statistic([0.0], rayleigh_cdf) == 1.0


def test_ks_two_point_median():
    med = math.sqrt(2 * math.log(2))
    assert abs(ks_statistic([med, med], rayleigh_cdf) - 0.5) < 1e-12


def test_ks_null_case_and_scipy_agreement():
    rnd = random.Random(2024)
    xs = [math.sqrt(-2 * math.log(1 - rnd.random())) for _ in range(10000)]
    d = ks_statistic(xs, rayleigh_cdf)
    assert d < 0.02
    assert abs(d - stats.kstest(xs, stats.rayleigh.cdf).statistic) < 1e-12


def test_ks_empty():
    with pytest.raises(ValueError):
        ks_statistic([], rayleigh_cdf)


def test_tolerance_file(tmp_path):
    p = tmp_path / "tol.txt"
    p.write_text("# calibrations\nrayleigh_ks = 0.05\nexact_se=4  # looser\n")
    tol = load_tolerances(p)
    assert tol == Tolerances(rayleigh_ks=0.05, exact_se=4.0)
    p.write_text("ks = 1\n")
    with pytest.raises(ValueError):
        load_tolerances(p)
    p.write_text("height_rel = -1\n")
    with pytest.raises(ValueError):
        load_tolerances(p)
    assert load_tolerances(None) == Tolerances()


def test_expected_height_tiny_general_sets():
    rep = run_expected_height("P4", 3, 100000, 3)
    exact = [r for r in rep.rows if r.statistic == "mean_height_exact"][0]
    assert exact.reference == 1.5
    assert exact.passed
    assert [r.passed for r in rep.rows if r.statistic == "mean_height"] == [None]


def test_expected_height_binary_sets():
    rep = run_expected_height("P3", 8, 20000, 4)
    assert rep.passed
    assert any(r.statistic == "mean_height_exact" for r in rep.rows)


def test_profile_small_n_against_series():
    rep = run_height_profile("P3", 10, 3, 20000, 5)
    assert rep.passed
    row = [r for r in rep.rows if r.statistic == "leaf_profile_exact" and r.k == 2][0]
    assert row.metric <= 3


@pytest.mark.parametrize("fam", ["P1", "P2", "P3", "P4"])
def test_root_is_alone_at_height_zero(fam):
    rep = run_height_profile(fam, 7, 0, 300, 6)
    root = [r for r in rep.rows if r.statistic == "node_profile" and r.k == 0][0]
    assert root.observed == 1.0 and root.metric == 0.0


def test_rayleigh_single_leaf_out_of_regime():
    rep = run_rayleigh("P3", 1, 10, 1)
    assert rep.rows[0].passed is None
    assert any("out of regime" in n for n in rep.notes)


def test_ordered_families_are_flagged():
    assert run_rayleigh("P1", 50, 50, 1).notes
    assert not run_rayleigh("P3", 50, 50, 1).notes


def test_reports_are_reproducible():
    a = run_height_profile("P4", 40, 3, 200, 9)
    from schroeder.experiments import clear_cache

    clear_cache()
    b = run_height_profile("P4", 40, 3, 200, 9)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    # a prefix of replicates does not depend on how many are requested
    clear_cache()
    assert replicates("P4", 40, 50, 9) == replicates("P4", 40, 200, 9)[:50]


def test_csv_layout():
    rep = run_expected_height("P3", 6, 100, 1)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "statistic,k,observed,reference,metric,pass"
    assert lines[1].startswith("mean_height,,") and lines[1].endswith(",")
    assert lines[2].endswith(",true") or lines[2].endswith(",false")


def test_exact_oracle_meta():
    # Monte Carlo means fall within 3 SE of the exact values in at least 99% of seeds
    outcomes = []
    for seed in range(100):
        rep = run_expected_height("P4", 6, 200, 1000 + seed)
        outcomes += [r.passed for r in rep.rows if r.statistic.endswith("_exact")]
        rep = run_height_profile("P2", 6, 2, 200, 1000 + seed)
        outcomes += [r.passed for r in rep.rows if r.statistic.endswith("_exact") and r.metric != 0]
    assert sum(outcomes) >= 0.99 * len(outcomes)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        run_expected_height("P3", 0, 10, 1)
    with pytest.raises(ValueError):
        run_expected_height("P3", 5, 0, 1)
    with pytest.raises(ValueError):
        run_height_profile("P3", 5, -1, 10, 1)


def test_rayleigh_distance_shrinks_with_n():
    ks = [run_rayleigh("P4", n, 2000, 5).rows[0].metric for n in (200, 1000, 5000)]
    assert ks[2] < ks[0]
    assert ks[1] < ks[0] + 0.01 and ks[2] < ks[1] + 0.01
