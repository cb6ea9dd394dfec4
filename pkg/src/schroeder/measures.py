"""Weighted tree measures, tilting, Galton-Watson offspring laws and Gibbs fragmentations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .counting import partition_sum, series_c
from .trees import Tree, leaf_count, postorder, preorder
from .weights import DPS, Family, WeightSeq, family


class MeasureError(ValueError):
    pass


def tree_weight(ws: WeightSeq, t: Tree) -> Fraction:
    """Product of zeta_deg(v) over all vertices."""
    w = Fraction(1)
    for v in preorder(t):
        w *= ws[len(v.children)]
        if not w:
            break
    return w


def q_probability(ws: WeightSeq, t: Tree) -> Fraction:
    """Exact probability of ``t`` under the weighted measure on n-leaf trees."""
    total = partition_sum(ws, leaf_count(t))
    if total == 0:
        raise MeasureError("zero partition sum: the measure is undefined at this size")
    return tree_weight(ws, t) / total


def tilt(ws: WeightSeq, a, b) -> WeightSeq:
    return ws.tilt(a, b)


# -- offspring distributions --------------------------------------------------


def _mp(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass(frozen=True)
class OffspringDist:
    """Offspring law on {0, 1, 2, ...}.

    ``pmf(i)`` returns an mpmath real at the package precision. ``exact`` holds
    the rational probabilities when the law is rational with finite support.
    ``geometric_tail = (i0, q)`` declares xi_i = xi_i0 q^(i - i0) for i >= i0, which
    lets the sampler invert the tail in closed form.
    """

    pmf: Callable[[int], mpmath.mpf]
    support_max: int | None = None
    exact: tuple[Fraction, ...] | None = None
    geometric_tail: tuple[int, mpmath.mpf] | None = None
    name: str = ""

    def __getitem__(self, i: int) -> mpmath.mpf:
        if self.support_max is not None and i > self.support_max:
            return mpmath.mpf(0)
        return self.pmf(i)

    def _moment(self, f: Callable[[int], object]) -> mpmath.mpf:
        with mpmath.workdps(DPS):
            if self.support_max is not None:
                return mpmath.fsum(f(i) * self[i] for i in range(self.support_max + 1))
            total = mpmath.mpf(0)
            eps = mpmath.mpf(10) ** (-DPS - 5)
            i, small = 0, 0
            while small < 8 or i < 8:
                term = f(i) * self[i]
                total += term
                small = small + 1 if abs(term) <= eps * max(abs(total), 1) else 0
                i += 1
                if i > 200000:
                    raise MeasureError("moment series did not converge")
            return total

    @property
    def total(self) -> mpmath.mpf:
        return self._moment(lambda i: 1)

    @property
    def mean(self) -> mpmath.mpf:
        return self._moment(lambda i: i)

    @property
    def variance(self) -> mpmath.mpf:
        with mpmath.workdps(DPS):
            return self._moment(lambda i: i * i) - self.mean**2

    def is_critical(self, tol: float = 1e-10) -> bool:
        return abs(self.mean - 1) < tol


def _exact_dist(probs: list[Fraction], name: str) -> OffspringDist:
    probs_t = tuple(probs)
    return OffspringDist(
        pmf=lambda i: _mp(probs_t[i]) if i < len(probs_t) else mpmath.mpf(0),
        support_max=len(probs_t) - 1,
        exact=probs_t,
        name=name,
    )


def offspring_from_weights(ws: WeightSeq, r, s, tol: float = 1e-12) -> OffspringDist:
    """Critical (or subcritical) offspring law whose leaf-conditioned GW tree has law Q_n.

    xi_0 = zeta_0 r / s and xi_j = s^(j-1) zeta_j / j! (labeled) or s^(j-1) zeta_j
    (ordered). Rational r, s with finite support give an exact law.
    """
    top = ws.max_degree
    if isinstance(r, Fraction) and isinstance(s, Fraction) and top is not None:
        fact = math.factorial if ws.labeled else (lambda j: 1)
        probs = [ws[0] * r / s] + [s ** (j - 1) * ws[j] / fact(j) for j in range(1, top + 1)]
        if sum(probs) != 1:
            raise MeasureError(f"(r, s) = ({r}, {s}) does not solve s = r + G(s): total {sum(probs)}")
        return _exact_dist(probs, f"xi[{ws.name}]")

    with mpmath.workdps(DPS):
        r_mp, s_mp = _mp(r), _mp(s)
        xi0 = _mp(ws[0]) * r_mp / s_mp

    def pmf(i: int) -> mpmath.mpf:
        with mpmath.workdps(DPS):
            if i == 0:
                return +xi0
            g = ws.g(i)
            return mpmath.mpf(g.numerator) / g.denominator * s_mp ** (i - 1)

    dist = OffspringDist(pmf=pmf, support_max=top, name=f"xi[{ws.name}]")
    if abs(dist.total - 1) > tol:
        raise MeasureError(f"inconsistent (r, s): probabilities sum to {mpmath.nstr(dist.total, 20)}")
    return dist


def uniform_ordered_offspring() -> OffspringDist:
    """The law whose leaf-conditioned GW tree is uniform on plane trees without unary vertices.

    xi_0 = 2(3 - 2 sqrt 2)/(2 - sqrt 2) and xi_i = ((2 - sqrt 2)/2)^(i-1) for i >= 2.
    """
    with mpmath.workdps(DPS):
        r2 = mpmath.sqrt(2)
        xi0 = 2 * (3 - 2 * r2) / (2 - r2)
        q = (2 - r2) / 2

    def pmf(i: int) -> mpmath.mpf:
        with mpmath.workdps(DPS):
            if i == 0:
                return +xi0
            if i == 1:
                return mpmath.mpf(0)
            return q ** (i - 1)

    return OffspringDist(pmf=pmf, geometric_tail=(2, q), name="xi^u")


def family_offspring(f: Family | str) -> OffspringDist:
    """Closed-form offspring laws of the four families (custom families are solved numerically)."""
    f = family(f)
    if f.name in ("P1", "P3"):
        return _exact_dist([Fraction(1, 2), Fraction(0), Fraction(1, 2)], f"xi[{f.name}]")
    if f.name == "P2":
        return uniform_ordered_offspring()
    if f.name == "P4":
        with mpmath.workdps(DPS):
            l2 = mpmath.log(2)
            xi0 = (2 * l2 - 1) / l2

        def pmf(i: int) -> mpmath.mpf:
            with mpmath.workdps(DPS):
                if i == 0:
                    return +xi0
                if i == 1:
                    return mpmath.mpf(0)
                return l2 ** (i - 1) / mpmath.factorial(i)

        return OffspringDist(pmf=pmf, name="xi[P4]")
    from .analytics import solve_characteristic

    r, s = solve_characteristic(f.weights)
    return offspring_from_weights(f.weights, r, s)


# -- Gibbs fragmentation model ------------------------------------------------

GIBBS_CAP = 40


def integer_partitions(n: int, min_parts: int = 1):
    """Partitions of n as non-increasing tuples with at least ``min_parts`` parts."""

    def rec(rest: int, largest: int):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, largest), 0, -1):
            for tail in rec(rest - p, p):
                yield (p,) + tail

    for lam in rec(n, n):
        if len(lam) >= min_parts:
            yield lam


@dataclass(frozen=True)
class GibbsModel:
    """alpha_k (k >= 2), Gibbs weight g(0..N) with g(0) = 0, normalizers Z(2..N)."""

    alpha: dict[int, Fraction]
    g: tuple[Fraction, ...]
    Z: dict[int, Fraction]

    @property
    def size(self) -> int:
        return len(self.g) - 1

    @property
    def combinatorial(self) -> bool:
        return all(self.Z[n] == self.g[n] for n in self.Z)

    def split_probability(self, sizes: tuple[int, ...]) -> Fraction:
        """p(#B_1, ..., #B_k) = alpha_k prod g(#B_j) / Z(n) for one block partition."""
        n = sum(sizes)
        if n > self.size or n < 2 or len(sizes) < 2:
            raise MeasureError(f"block sizes {sizes} out of range for a model of size {self.size}")
        p = self.alpha.get(len(sizes), Fraction(0))
        for b in sizes:
            p *= self.g[b]
        return p / self.Z[n]


def gibbs_normalizer(alpha: dict[int, Fraction], g: tuple[Fraction, ...], n: int) -> Fraction:
    """Z(n) summed over unordered set partitions of [n] into >= 2 blocks.

    Set partitions are grouped by block-size profile: a profile with parts
    n_1..n_k and part multiplicities m_j occurs n!/(prod n_i! prod m_j!) times.
    """
    total = Fraction(0)
    nf = math.factorial(n)
    for lam in integer_partitions(n, min_parts=2):
        a = alpha.get(len(lam), Fraction(0))
        if not a:
            continue
        mult = nf
        for p in lam:
            mult //= math.factorial(p)
        for p in set(lam):
            mult //= math.factorial(lam.count(p))
        term = a * mult
        for p in lam:
            term *= g[p]
        total += term
    return total


def gibbs_from_weights(ws: WeightSeq, size: int) -> GibbsModel:
    """alpha_k = zeta_k and g(k) = k! [z^k] C, with Z computed independently by partition sums."""
    if not ws.labeled:
        raise MeasureError("Gibbs fragmentations are leaf-labeled: use labeled weights")
    if ws[1] != 0:
        raise MeasureError("zeta_1 must be 0")
    if size > GIBBS_CAP:
        raise MeasureError(f"partition enumeration capped at n <= {GIBBS_CAP}")
    c = series_c(ws, size)
    g = (Fraction(0),) + tuple(c[k] * math.factorial(k) for k in range(1, size + 1))
    alpha = {k: ws[k] for k in range(2, size + 1) if ws[k]}
    Z = {n: gibbs_normalizer(alpha, g, n) for n in range(2, size + 1)}
    return GibbsModel(alpha, g, Z)


def gibbs_tree_probability(model: GibbsModel, t: Tree) -> Fraction:
    """Product over internal vertices of the probability of the split into child blocks."""
    counts: dict[int, int] = {}
    p = Fraction(1)
    for v in postorder(t):
        if v.is_leaf:
            counts[id(v)] = 1
            continue
        if len(v.children) == 1:
            raise MeasureError("fragmentation trees have no vertex of out-degree 1")
        sizes = tuple(counts[id(c)] for c in v.children)
        counts[id(v)] = sum(sizes)
        p *= model.split_probability(sizes)
    return p
