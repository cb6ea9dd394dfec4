"""Exact counting through the functional equation C = zeta_0 z + G(C).

Everything here is exact rational arithmetic. The brute-force enumerators
are independent of the series code and serve as its oracle.
"""

from __future__ import annotations

import itertools
import math
import operator
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .series import TruncatedSeries
from .trees import LEAF, Tree, canonicalize, preorder, relabel, shape
from .weights import Family, WeightSeq, family

ENUMERATION_CAP = {"ordered": 8, "labeled": 7}


class UndefinedMeasureError(ValueError):
    """No tree of the requested size has positive weight."""


class _Solver:
    """Incremental coefficient solver for C; keeps the power table so it can be extended.

    ``rows[k][m]`` holds [z^m] C^k, scaled by m! for labeled weights. For k >= 2
    it only involves coefficients of index < m, so coefficient m of C follows
    from the table built so far. Integral weights run on Python ints (labeled
    convolutions then carry binomial factors); anything else on Fractions.
    """

    def __init__(self, ws: WeightSeq):
        self.ws = ws
        self.integral = True
        self._reset()

    def _reset(self) -> None:
        self.rows: dict[int, list] = {1: [0]}
        self.c: list[Fraction] = [Fraction(0)]
        self._zeta: dict[int, object] = {}

    def zeta(self, k: int):
        if k not in self._zeta:
            z = self.ws[k]
            if self.integral and z.denominator != 1:
                raise _NotIntegral
            self._zeta[k] = z.numerator if self.integral else self.ws.g(k)
        return self._zeta[k]

    def extend(self, order: int) -> None:
        try:
            self._extend(order)
        except _NotIntegral:
            self.integral = False
            self._reset()
            self._extend(order)

    def _extend(self, order: int) -> None:
        cs = self.rows[1]
        top_degree = self.ws.max_degree
        scaled = self.integral and self.ws.labeled
        for m in range(len(cs), order + 1):
            kmax = m if top_degree is None else min(m, top_degree)
            value = self.zeta(0) if m == 1 else 0
            binom = [math.comb(m, i) for i in range(m + 1)] if scaled else None
            for k in range(2, kmax + 1):
                prev = self.rows[k - 1]
                row = self.rows.setdefault(k, [0] * m)
                # C^(k-1) vanishes below z^(k-1): pair c_i with [z^(m-i)]C^(k-1) for i <= m-k+1
                heads = cs[1 : m - k + 2]
                tails = prev[m - 1 : k - 2 : -1]
                if scaled:
                    acc = sum(map(operator.mul, map(operator.mul, binom[1 : m - k + 2], heads), tails))
                else:
                    acc = sum(map(operator.mul, heads, tails))
                row.append(acc)
                zk = self.zeta(k)
                if zk:
                    value += zk * acc // math.factorial(k) if scaled else zk * acc
            cs.append(value)
            self.c.append(Fraction(value, math.factorial(m)) if scaled else Fraction(value))

    def power(self, k: int, m: int) -> Fraction:
        """[z^m] C^k (unscaled); requires the table to reach m."""
        row = self.rows.get(k)
        if row is None or m >= len(row):
            return Fraction(0)
        v = row[m]
        return Fraction(v, math.factorial(m)) if self.integral and self.ws.labeled else Fraction(v)

    def series(self, order: int) -> TruncatedSeries:
        self.extend(order)
        return TruncatedSeries(self.c[: order + 1])


class _NotIntegral(Exception):
    pass


_solvers: dict[int, _Solver] = {}


def _solver(ws: WeightSeq) -> _Solver:
    s = _solvers.get(id(ws))
    if s is None or s.ws is not ws:
        s = _solvers[id(ws)] = _Solver(ws)
    return s


def series_c(ws: WeightSeq, order: int) -> TruncatedSeries:
    """Prefix of the weighted generating function C (OGF for ordered, EGF for labeled)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    return _solver(ws).series(order)


def power_table(ws: WeightSeq, order: int, kmax: int) -> dict[int, list[Fraction]]:
    """[z^m] C^k for 1 <= k <= kmax and 0 <= m <= order."""
    s = _solver(ws)
    s.extend(order)
    out: dict[int, list[Fraction]] = {1: list(s.c[: order + 1])}
    for k in range(2, kmax + 1):
        if k in s.rows:
            out[k] = [s.power(k, m) for m in range(order + 1)]
        else:
            # degree above the support of G: the solver never needed this power
            prev = out[k - 1]
            out[k] = [sum((s.c[i] * prev[m - i] for i in range(1, m)), Fraction(0)) for m in range(order + 1)]
    return out


def partition_sum(ws: WeightSeq, n: int) -> Fraction:
    """Total weight of n-leaf trees: n![z^n]C for labeled, [z^n]C for ordered."""
    c = series_c(ws, n)[n]
    return c * math.factorial(n) if ws.labeled else c


def family_count(f: Family | str, n: int) -> int:
    if n < 1:
        raise ValueError("n must be at least 1")
    total = partition_sum(family(f).weights, n)
    if total.denominator != 1:
        raise ValueError("weights are not integral; use partition_sum for weighted totals")
    return total.numerator


# -- brute-force enumeration oracle -------------------------------------------


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Ordered k-tuples of positive integers summing to n."""
    for cuts in itertools.combinations(range(1, n), k - 1):
        yield tuple(b - a for a, b in zip((0,) + cuts, cuts + (n,)))


def set_partitions(items: list) -> Iterator[list[list]]:
    """All partitions of ``items``; blocks appear in order of their first element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _ordered_trees(ws: WeightSeq, n: int) -> list[Tree]:
    @lru_cache(maxsize=None)
    def gen(m: int) -> tuple[Tree, ...]:
        if m == 1:
            return (LEAF,)
        out = []
        for k in ws.support(m):
            for comp in compositions(m, k):
                for kids in itertools.product(*(gen(x) for x in comp)):
                    out.append(Tree(kids))
        return tuple(out)

    return list(gen(n))


def _labeled_trees(ws: WeightSeq, n: int) -> list[Tree]:
    allowed = set(ws.support(n))

    @lru_cache(maxsize=None)
    def gen(block: tuple[int, ...]) -> tuple[Tree, ...]:
        if len(block) == 1:
            return (Tree(label=block[0]),)
        out = []
        for part in set_partitions(list(block)):
            if len(part) not in allowed:
                continue
            # blocks come sorted by their minimum, which is the canonical child order
            for kids in itertools.product(*(gen(tuple(b)) for b in part)):
                out.append(Tree(kids))
        return tuple(out)

    return list(gen(tuple(range(1, n + 1))))


def enumerate_trees(f: Family | str | WeightSeq, n: int, cap: int | None = None) -> list[Tree]:
    """Every tree of positive weight with n leaves, each exactly once.

    Ordered families come out as plane trees; labeled families in canonical form.
    """
    ws = f if isinstance(f, WeightSeq) else family(f).weights
    limit = cap if cap is not None else ENUMERATION_CAP["labeled" if ws.labeled else "ordered"]
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > limit:
        raise ValueError(f"enumeration capped at n <= {limit}")
    trees = _labeled_trees(ws, n) if ws.labeled else _ordered_trees(ws, n)
    if ws.labeled:
        # generated canonical; keep the de-duplication guarantee explicit
        trees = list(dict.fromkeys(canonicalize(t) for t in trees))
    return trees


# -- additive functionals -----------------------------------------------------


def g_prime_series(ws: WeightSeq, order: int) -> TruncatedSeries:
    """G'(C(z)) to the given order."""
    c = series_c(ws, order)
    top = order + 1 if ws.max_degree is None else min(order + 1, ws.max_degree)
    gp = TruncatedSeries([(k + 1) * ws.g(k + 1) for k in range(top + 1)], order)
    return gp.compose(c)


def additive_functional(ws: WeightSeq, theta: TruncatedSeries, psi: TruncatedSeries) -> TruncatedSeries:
    """Generating function of xi(t) = theta(t) + sum over root subtrees of psi(subtree)."""
    order = min(theta.order, psi.order)
    return theta + g_prime_series(ws, order) * psi


def recursive_additive_functional(ws: WeightSeq, theta: TruncatedSeries) -> TruncatedSeries:
    """The case psi = xi, solved as theta / (1 - G'(C))."""
    return theta / (1 - g_prime_series(ws, theta.order))


def leaf_profile_series(ws: WeightSeq, order: int, k: int) -> TruncatedSeries:
    """Weighted generating function of the number of leaves at height k."""
    xi = TruncatedSeries.z(order) * ws[0]
    zero = TruncatedSeries.zero(order)
    for _ in range(k):
        xi = additive_functional(ws, zero, xi)
    return xi


def node_profile_series(ws: WeightSeq, order: int, k: int) -> TruncatedSeries:
    """Weighted generating function of the number of vertices at height k."""
    lam = series_c(ws, order)
    zero = TruncatedSeries.zero(order)
    for _ in range(k):
        lam = additive_functional(ws, zero, lam)
    return lam


def sum_leaf_heights_series(ws: WeightSeq, order: int) -> TruncatedSeries:
    """Weighted generating function of the sum of leaf heights.

    z C'^2 / zeta_0 counts the sum of (height + 1) over leaves, so the leaf
    count series z C' is subtracted.
    """
    cp = series_c(ws, order + 1).derivative()
    return ((cp * cp) / ws[0] - cp).mul_z()


def _ratio(num: TruncatedSeries, ws: WeightSeq, n: int) -> Fraction:
    den = series_c(ws, n)[n]
    if den == 0:
        raise UndefinedMeasureError(f"no tree with {n} leaves has positive weight")
    return num[n] / den


def _weights(f) -> WeightSeq:
    return f if isinstance(f, WeightSeq) else family(f).weights


def exact_leaf_profile_expectation(f, n: int, k: int) -> Fraction:
    ws = _weights(f)
    return _ratio(leaf_profile_series(ws, n, k), ws, n)


def exact_node_profile_expectation(f, n: int, k: int) -> Fraction:
    ws = _weights(f)
    return _ratio(node_profile_series(ws, n, k), ws, n)


def exact_sum_leaf_heights_expectation(f, n: int) -> Fraction:
    ws = _weights(f)
    return _ratio(sum_leaf_heights_series(ws, n), ws, n)


def exact_leaf_profile(f, n: int) -> list[Fraction]:
    """Expected number of leaves at heights 0..n-1 (one series pass)."""
    ws = _weights(f)
    gp = g_prime_series(ws, n)
    xi = TruncatedSeries.z(n) * ws[0]
    out = []
    for _ in range(n):
        out.append(_ratio(xi, ws, n))
        xi = gp * xi
    return out


# -- ordered/labeled correspondence -------------------------------------------


def ordered_label_identity_check(n: int) -> bool:
    """#ordered(shape) * #labels_t(shape) == prod deg(v)! for every general labeled tree.

    Both factors on the left are counted by brute force: the first over all
    plane trees without unary vertices, the second over all n! labelings of
    one plane representative.
    """
    if n > 6:
        raise ValueError("identity check is brute force; n <= 6")
    from .weights import P2, P4

    plane = enumerate_trees(P2, n)
    by_shape: dict[Tree, list[Tree]] = {}
    for x in plane:
        by_shape.setdefault(shape(x), []).append(x)
    for t in enumerate_trees(P4, n):
        sh = shape(t)
        reps = by_shape.get(sh, [])
        n_ordered = len(reps)
        if n_ordered == 0:
            return False
        x = reps[0]
        target = canonicalize(t)
        n_labels = sum(
            1 for perm in itertools.permutations(range(1, n + 1)) if canonicalize(relabel(x, perm)) == target
        )
        rhs = math.prod(math.factorial(len(v.children)) for v in preorder(t))
        if n_ordered * n_labels != rhs:
            return False
    return True


def enumeration_average(f, n: int, stat) -> Fraction:
    """Exact Q_n-average of ``stat(tree)`` over the enumerated support."""
    from .measures import q_probability

    ws = _weights(f)
    return sum((q_probability(ws, t) * stat(t) for t in enumerate_trees(ws, n)), Fraction(0))

