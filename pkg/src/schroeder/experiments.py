"""Monte Carlo checks of leaf heights and height profiles.

Replicate i of a run with seed S always uses ``RngStream(S, i)``, so a report
depends only on (family, n, reps, seed, statistic). Sampled replicate data is
memoized per (family, n, seed), which lets several experiments at the same
size share trees without changing any result.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from bisect import bisect_right
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from itertools import accumulate
from pathlib import Path
from typing import Callable, Sequence

from .analytics import characteristic, rayleigh_cdf
from .counting import exact_leaf_profile_expectation, exact_node_profile_expectation, exact_sum_leaf_heights_expectation
from .samplers import RngStream, counting_sampler, table_sampler
from .trees import tree_statistics
from .weights import Family, family

EXACT_MAX_N = 30  # exact finite-n oracles are used up to this size
EXACT_SAMPLER_MAX_N = 64  # above this, replicates come from the float64 table sampler


@dataclass(frozen=True)
class Tolerances:
    rayleigh_ks: float = 0.03
    height_rel: float = 0.05
    profile_rel: float = 0.05
    exact_se: float = 3.0


def load_tolerances(path: str | Path | None) -> Tolerances:
    """Read ``key = value`` lines (``#`` starts a comment) over the defaults."""
    if path is None:
        return Tolerances()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[tolerances]\n" + Path(path).read_text())
    known = {f.name for f in fields(Tolerances)}
    values = {}
    for key, raw in parser["tolerances"].items():
        if key not in known:
            raise ValueError(f"unknown tolerance key {key!r}; expected one of {sorted(known)}")
        values[key] = float(raw)
        if not values[key] > 0:
            raise ValueError(f"tolerance {key} must be positive")
    return Tolerances(**values)


@dataclass(frozen=True)
class Row:
    """One compared quantity.

    ``metric`` is a KS distance, a relative error or a z-score (in standard
    errors) as named by ``metric_name``. ``passed`` is None for rows that are
    reported for information only.
    """

    statistic: str
    k: int | None
    observed: float
    reference: float
    metric: float
    metric_name: str
    passed: bool | None


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    family: str
    n: int
    reps: int
    seed: int
    rows: tuple[Row, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rows"] = [asdict(r) for r in self.rows]
        d["notes"] = list(self.notes)
        d["pass"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["statistic", "k", "observed", "reference", "metric", "pass"])
        for r in self.rows:
            w.writerow([
                r.statistic,
                "" if r.k is None else r.k,
                repr(r.observed),
                repr(r.reference),
                repr(r.metric),
                "" if r.passed is None else str(r.passed).lower(),
            ])
        return buf.getvalue()


def ks_statistic(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """sup |F_N - F| via max over sorted x_(i) of F(x_(i)) - (i-1)/N and i/N - F(x_(i))."""
    xs = sorted(samples)
    n = len(xs)
    if n == 0:
        raise ValueError("KS statistic of an empty sample")
    d = 0.0
    for i, x in enumerate(xs):
        fx = cdf(x)
        d = max(d, fx - i / n, (i + 1) / n - fx)
    return d


# -- replicate data ---------------------------------------------------------------


@dataclass(frozen=True)
class Replicate:
    leaf_height: int  # height of one uniformly chosen leaf
    leaf_profile: tuple[int, ...]  # leaves at heights 0..kcap
    node_profile: tuple[int, ...]


def _pad(xs: Sequence[int], kcap: int) -> tuple[int, ...]:
    xs = tuple(xs[: kcap + 1])
    return xs + (0,) * (kcap + 1 - len(xs))


def _one_replicate(f: Family, n: int, seed: int, i: int, kcap: int) -> Replicate:
    rng = RngStream(seed, i)
    if n <= EXACT_SAMPLER_MAX_N:
        from .samplers import sample_labeled, sample_ordered

        ws = f.weights
        t = sample_labeled(ws, n, rng) if f.labeled else sample_ordered(ws, n, rng)
        st = tree_statistics(t)
        top = st.height
        leaf_h = [st.leaves_at_height.get(d, 0) for d in range(top + 1)]
        node_h = [st.nodes_at_height.get(d, 0) for d in range(top + 1)]
    else:
        leaf_h, node_h = table_sampler(f.weights, n).sample_profiles(n, rng)
    pick = rng.randrange(n)
    h = bisect_right(list(accumulate(leaf_h)), pick)
    return Replicate(h, _pad(leaf_h, kcap), _pad(node_h, kcap))


_cache: dict[tuple, tuple[int, list[Replicate]]] = {}


def replicates(f: Family | str, n: int, reps: int, seed: int, kcap: int = 16) -> list[Replicate]:
    """Replicates 0..reps-1, memoized and extended on demand."""
    f = family(f)
    if n < 1:
        raise ValueError("n must be positive")
    if reps < 1:
        raise ValueError("reps must be positive")
    key = (f.name, id(f.weights), n, seed)
    cap, data = _cache.get(key, (-1, []))
    if cap < kcap:
        cap, data = kcap, []
    if n <= EXACT_SAMPLER_MAX_N:
        counting_sampler(f.weights, n)
    for i in range(len(data), reps):
        data.append(_one_replicate(f, n, seed, i, cap))
    _cache[key] = (cap, data)
    return data[:reps]


def clear_cache() -> None:
    _cache.clear()


def _mean_se(xs: Sequence[float]) -> tuple[float, float]:
    m = math.fsum(xs) / len(xs)
    if len(xs) < 2:
        return m, 0.0
    var = math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)
    return m, math.sqrt(var / len(xs))


def _rel(obs: float, ref: float) -> float:
    return abs(obs - ref) / abs(ref) if ref else (0.0 if obs == 0 else math.inf)


def _z(obs: float, ref: Fraction, se: float) -> float:
    diff = abs(obs - float(ref))
    if se == 0:
        return 0.0 if diff < 1e-12 else math.inf
    return diff / se


def _extension_note(f: Family) -> tuple[str, ...]:
    if f.labeled:
        return ()
    return ("ordered family: limit constants come from the ordinary generating function; empirical extension",)


# -- experiments ----------------------------------------------------------------------


def run_rayleigh(f: Family | str, n: int, reps: int, seed: int, tol: Tolerances | None = None) -> ExperimentReport:
    """KS distance between lambda H_n / sqrt(n) and Rayleigh(1)."""
    f, tol = family(f), tol or Tolerances()
    data = replicates(f, n, reps, seed)
    lam = float(characteristic(f).lam)
    xs = [lam * r.leaf_height / math.sqrt(n) for r in data]
    d = ks_statistic(xs, rayleigh_cdf)
    notes = _extension_note(f)
    passed: bool | None = d <= tol.rayleigh_ks
    if n == 1:
        passed = None
        notes += ("out of regime: H_1 = 0",)
    row = Row("rayleigh_ks", None, d, 0.0, d, "ks", passed)
    return ExperimentReport("rayleigh", f.name, n, reps, seed, (row,), notes)


def run_expected_height(f: Family | str, n: int, reps: int, seed: int, tol: Tolerances | None = None) -> ExperimentReport:
    f, tol = family(f), tol or Tolerances()
    data = replicates(f, n, reps, seed)
    mean, se = _mean_se([r.leaf_height for r in data])
    ref = float(characteristic(f).height_const) * math.sqrt(n)
    rel = _rel(mean, ref)
    rows = [Row("mean_height", None, mean, ref, rel, "rel", rel <= tol.height_rel if n > EXACT_MAX_N else None)]
    if n <= EXACT_MAX_N:
        exact = exact_sum_leaf_heights_expectation(f.weights, n) / n
        z = _z(mean, exact, se)
        rows.append(Row("mean_height_exact", None, mean, float(exact), z, "se", z <= tol.exact_se))
    return ExperimentReport("height", f.name, n, reps, seed, tuple(rows), _extension_note(f))


def run_height_profile(
    f: Family | str, n: int, kmax: int, reps: int, seed: int, tol: Tolerances | None = None
) -> ExperimentReport:
    """Mean leaves and vertices at heights k against the linear limits and exact values."""
    f, tol = family(f), tol or Tolerances()
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    data = replicates(f, n, reps, seed, kcap=max(16, kmax))
    sol = characteristic(f)
    asymptotic = n > EXACT_MAX_N
    rows = []
    for k in range(kmax + 1):
        for stat, column, ref in (
            ("leaf_profile", [r.leaf_profile[k] for r in data], float(sol.g2 * sol.r * k)),
            ("node_profile", [r.node_profile[k] for r in data], float(sol.s * sol.g2 * k + 1)),
        ):
            mean, se = _mean_se(column)
            if stat == "leaf_profile" and k == 0:
                rows.append(Row(stat, k, mean, ref, abs(mean - ref), "abs", None))
            else:
                rel = _rel(mean, ref)
                rows.append(Row(stat, k, mean, ref, rel, "rel", rel <= tol.profile_rel if asymptotic else None))
            if not asymptotic:
                oracle = exact_leaf_profile_expectation if stat == "leaf_profile" else exact_node_profile_expectation
                exact = oracle(f.weights, n, k)
                z = _z(mean, exact, se)
                rows.append(Row(stat + "_exact", k, mean, float(exact), z, "se", z <= tol.exact_se))
    return ExperimentReport("profile", f.name, n, reps, seed, tuple(rows), _extension_note(f))

