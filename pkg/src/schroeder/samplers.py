"""Random trees of a given leaf count.

Two independent routes produce the weighted law Q_n:

* the recursive counting method (``sample_ordered`` / ``sample_labeled``), which
  draws the root degree and the child sizes from exact integer tables;
* rejection from an unconditioned Galton-Watson tree (``sample_gw_conditioned``).

``TableSampler`` runs the counting method on double-precision tables scaled by
r^m. It is meant for Monte Carlo at sizes where exact tables would be far too
large, and can return height profiles without building tree objects.
"""

from __future__ import annotations

import hashlib
import math
import random
from bisect import bisect_right
from fractions import Fraction
from itertools import accumulate

import mpmath
import numpy as np

from .counting import power_table, series_c
from .measures import OffspringDist, family_offspring
from .trees import Tree, from_preorder_degrees
from .weights import DPS, Family, WeightSeq, family


class SamplingError(ValueError):
    pass


class RetryBudgetExceeded(SamplingError):
    def __init__(self, attempts: int):
        super().__init__(f"no tree of the requested size after {attempts} attempts")
        self.attempts = attempts


class RngStream(random.Random):
    """Reproducible random stream identified by (seed, stream id).

    The Mersenne Twister state is seeded with the SHA-256 digest of
    ``b"schroeder.rng/1" + seed (8 bytes, big endian) + stream (8 bytes, big endian)``.
    Python's integer seeding and its ``random``/``randrange``/``shuffle`` are
    platform independent, so a (seed, stream) pair fixes the whole sequence.
    """

    def __new__(cls, seed: int = 0, stream: int = 0):
        return super().__new__(cls)

    def __init__(self, seed: int = 0, stream: int = 0):
        if not (0 <= seed < 2**64 and 0 <= stream < 2**64):
            raise ValueError("seed and stream id must be 64-bit unsigned integers")
        self.seed_value = seed
        self.stream = stream
        digest = hashlib.sha256(b"schroeder.rng/1" + seed.to_bytes(8, "big") + stream.to_bytes(8, "big")).digest()
        super().__init__(int.from_bytes(digest, "big"))

    def spawn(self, stream: int) -> RngStream:
        return RngStream(self.seed_value, stream)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed_value}, stream={self.stream})"


def _canonical_labeled(degs: list[int], labels: list[int]) -> Tree:
    """Canonical labeled tree of a preorder degree sequence, leaves labeled by ``labels`` right to left.

    Equivalent to relabeling the plane tree and canonicalizing, in one pass.
    """
    built: list[tuple[int, Tree]] = []
    li = len(labels)
    for d in reversed(degs):
        if d == 0:
            li -= 1
            lab = labels[li]
            built.append((lab, Tree(label=lab)))
        else:
            kids = built[-d:]
            del built[-d:]
            kids.sort()  # labels are distinct, so trees are never compared
            built.append((kids[0][0], Tree(tuple(t for _, t in kids))))
    return built[0][1]


def _uniform_labels(n: int, rng: random.Random) -> list[int]:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return perm


def _int_cumulative(weights: list[Fraction]) -> list[int]:
    den = math.lcm(*(w.denominator for w in weights))
    return list(accumulate(int(w * den) for w in weights))


# -- exact counting method ------------------------------------------------------


class CountingSampler:
    """Exact sampler for the ordered law with weights g_k (zeta_k, or zeta_k/k! if labeled).

    At a vertex with m leaves the degree k is drawn with probability
    proportional to g_k [z^m]C^k; the k child sizes are then drawn left to
    right, the first of a j-forest holding x leaves with weight
    [z^x]C * [z^(m-x)]C^(j-1). All tables are exact integers.
    """

    def __init__(self, ws: WeightSeq, nmax: int):
        self.ws = ws
        self.nmax = nmax
        self.kmax = nmax if ws.max_degree is None else min(nmax, ws.max_degree)
        self.powers = power_table(ws, nmax, self.kmax)
        self.c = self.powers[1]
        self._degree: dict[int, tuple[list[int], list[int]]] = {}
        self._split: dict[tuple[int, int], list[int]] = {}

    def total(self, m: int) -> Fraction:
        return self.c[m]

    def degree_table(self, m: int) -> tuple[list[int], list[int]]:
        tab = self._degree.get(m)
        if tab is None:
            ks = [k for k in self.ws.support(min(m, self.kmax)) if self.powers[k][m]]
            tab = self._degree[m] = (ks, _int_cumulative([self.ws.g(k) * self.powers[k][m] for k in ks]))
        return tab

    def split_table(self, j: int, m: int) -> list[int]:
        tab = self._split.get((j, m))
        if tab is None:
            rest = self.powers[j - 1]
            tab = self._split[(j, m)] = _int_cumulative([self.c[x] * rest[m - x] for x in range(1, m - j + 2)])
        return tab

    def sample_degrees(self, n: int, rng: random.Random) -> list[int]:
        """Preorder out-degree sequence of one sampled plane tree."""
        if n < 1 or n > self.nmax:
            raise SamplingError(f"size {n} outside 1..{self.nmax}")
        if self.c[n] == 0:
            raise SamplingError(f"no tree with {n} leaves has positive weight")
        degs: list[int] = []
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                degs.append(0)
                continue
            ks, cum = self.degree_table(m)
            k = ks[bisect_right(cum, rng.randrange(cum[-1]))]
            sizes = []
            rest = m
            for j in range(k, 1, -1):
                cum = self.split_table(j, rest)
                x = bisect_right(cum, rng.randrange(cum[-1])) + 1
                sizes.append(x)
                rest -= x
            sizes.append(rest)
            degs.append(k)
            stack.extend(reversed(sizes))
        return degs

    def sample(self, n: int, rng: random.Random) -> Tree:
        return from_preorder_degrees(self.sample_degrees(n, rng))


_counting: dict[int, CountingSampler] = {}


def counting_sampler(ws: WeightSeq, n: int) -> CountingSampler:
    s = _counting.get(id(ws))
    if s is None or s.ws is not ws or s.nmax < n:
        s = _counting[id(ws)] = CountingSampler(ws, max(n, 16))
    return s


def sample_ordered(ws: WeightSeq, n: int, rng: random.Random) -> Tree:
    """Exact draw from Q_n on plane trees."""
    if ws.labeled:
        raise SamplingError("sample_ordered needs ordered weights")
    return counting_sampler(ws, n).sample(n, rng)


def sample_labeled(ws: WeightSeq, n: int, rng: random.Random) -> Tree:
    """Exact draw from Q_n on leaf-labeled trees, in canonical form.

    A plane tree is drawn with weights zeta_k/k!, its leaves get a uniform
    random labeling and the order is forgotten.
    """
    if not ws.labeled:
        raise SamplingError("sample_labeled needs labeled weights")
    degs = counting_sampler(ws, n).sample_degrees(n, rng)
    return _canonical_labeled(degs, _uniform_labels(n, rng))


# -- Galton-Watson rejection ------------------------------------------------------


class _OffspringDraw:
    """Inverse-CDF draws from an offspring law.

    Rational laws use exact integer tables. Otherwise cumulative sums are
    formed at high precision and rounded to doubles; a uniform u in [0, 1)
    picks the smallest i with u < F(i) (half-open, left-closed cells). A
    declared geometric tail is inverted in closed form.
    """

    def __init__(self, xi: OffspringDist):
        self.xi = xi
        self.exact = xi.exact
        if self.exact is not None:
            self.cum_int = _int_cumulative(list(self.exact))
            self.vals = list(range(len(self.exact)))
            return
        self.cum: list[float] = []
        self._mp_total = mpmath.mpf(0)
        self.tail = xi.geometric_tail
        if self.tail is not None:
            i0, q = self.tail
            self._extend(i0 - 1)
            with mpmath.workdps(DPS):
                self.q = float(q)
                self.log_q = float(mpmath.log(q))
                self.tail_scale = float((1 - q) / xi[i0])
            self.head = self.cum[-1]
        else:
            self._extend(16)

    def _extend(self, upto: int) -> None:
        with mpmath.workdps(DPS):
            for i in range(len(self.cum), upto + 1):
                self._mp_total += self.xi[i]
                self.cum.append(float(self._mp_total))

    def __call__(self, rng: random.Random) -> int:
        if self.exact is not None:
            return bisect_right(self.cum_int, rng.randrange(self.cum_int[-1]))
        u = rng.random()
        if self.tail is not None:
            if u < self.head:
                return bisect_right(self.cum, u)
            t = 1.0 - (u - self.head) * self.tail_scale
            if t <= 0.0:
                t = 5e-324
            return self.tail[0] + int(math.floor(math.log(t) / self.log_q))
        while u >= self.cum[-1]:
            if len(self.cum) > 100000:
                raise SamplingError("offspring law does not sum to 1")
            self._extend(2 * len(self.cum))
        return bisect_right(self.cum, u)


def sample_gw_conditioned(
    xi: OffspringDist,
    n: int,
    labeled: bool,
    rng: random.Random,
    max_attempts: int = 10**7,
    vertex_cap: int | None = None,
    draw: _OffspringDraw | None = None,
) -> Tree:
    """First Galton-Watson tree with exactly n leaves among independent attempts.

    Attempts grow depth first and stop as soon as the leaves found plus the
    pending vertices (each of which carries at least one leaf) exceed n. When
    xi_1 > 0 a vertex cap (default 100 n + 1000) bounds unary chains.
    """
    if n < 1:
        raise SamplingError("n must be at least 1")
    if max_attempts < 1:
        raise SamplingError("max_attempts must be positive")
    draw = draw or _OffspringDraw(xi)
    if vertex_cap is None:
        vertex_cap = 2 * n - 1 if xi[1] == 0 else 100 * n + 1000
    for _ in range(max_attempts):
        degs: list[int] = []
        pending, found = 1, 0
        while pending:
            k = draw(rng)
            degs.append(k)
            pending += k - 1
            if k == 0:
                found += 1
            if found + pending > n or len(degs) > vertex_cap:
                break
        else:
            if found == n:
                if labeled:
                    return _canonical_labeled(degs, _uniform_labels(n, rng))
                return from_preorder_degrees(degs)
    raise RetryBudgetExceeded(max_attempts)


def sample_family(f: Family | str, n: int, rng: random.Random, method: str = "counting") -> Tree:
    """Uniform tree of family f with n leaves."""
    f = family(f)
    if method == "counting":
        return sample_labeled(f.weights, n, rng) if f.labeled else sample_ordered(f.weights, n, rng)
    if method == "gw":
        return sample_gw_conditioned(family_offspring(f), n, f.labeled, rng, draw=_gw_draw(f))
    raise ValueError(f"unknown method {method!r}")


_gw_draws: dict[str, _OffspringDraw] = {}


def _gw_draw(f: Family) -> _OffspringDraw:
    d = _gw_draws.get(f.name)
    if d is None or f.name not in ("P1", "P2", "P3", "P4"):
        d = _gw_draws[f.name] = _OffspringDraw(family_offspring(f))
    return d


# -- double-precision counting method --------------------------------------------


class TableSampler:
    """Counting-method sampler on float64 tables, for large n.

    With a(m) = r^m [z^m]C and S(k, m) = r^m [z^m]C^k every table entry stays
    within double range. Degrees above ``self.J`` are dropped once their share
    of every a(m) is below 1e-17. Draws use a uniform double against
    normalized cumulative sums, so the law matches Q_n up to rounding.
    """

    CACHE_M = 2500

    def __init__(self, ws: WeightSeq, nmax: int, scale: float | None = None):
        from .analytics import characteristic

        self.ws = ws
        self.nmax = nmax
        self.rho = float(characteristic(ws).r) if scale is None else scale
        J = nmax if ws.max_degree is not None else min(nmax, 40)
        if ws.max_degree is not None:
            J = min(nmax, ws.max_degree)
        while True:
            self._build(J)
            if J >= nmax or ws.max_degree is not None:
                break
            share = self.g[J] * self.S[J, J:] / self.S[1, J:]
            if np.max(share) < 1e-17:
                break
            J = min(nmax, 2 * J)
        self.J = J
        self.degrees = [k for k in range(2, J + 1) if self.g[k] > 0]
        self._deg_cache: dict[int, tuple[list[int], list[float]]] = {}
        self._split_cache: dict[tuple[int, int], object] = {}

    def _build(self, J: int) -> None:
        n = self.nmax
        g = np.zeros(J + 1)
        for k in range(2, J + 1):
            gk = self.ws.g(k)
            g[k] = gk.numerator / gk.denominator if gk else 0.0
        S = np.zeros((J + 1, n + 1))
        S[1, 1] = float(self.ws[0]) * self.rho
        a = S[1]
        for m in range(2, n + 1):
            total = 0.0
            for k in range(2, min(J, m) + 1):
                v = float(np.dot(a[1 : m - k + 2], S[k - 1, m - 1 : k - 2 : -1] if k > 2 else a[m - 1 : 0 : -1]))
                S[k, m] = v
                total += g[k] * v
            a[m] = total
        self.g = g
        self.S = S
        self.a = a

    def degree_table(self, m: int) -> tuple[list[int], list[float]]:
        tab = self._deg_cache.get(m)
        if tab is None:
            ks = [k for k in self.degrees if k <= m]
            w = [self.g[k] * self.S[k, m] for k in ks]
            tot = math.fsum(w)
            cum = [x / tot for x in accumulate(w)]
            cum[-1] = 2.0
            tab = self._deg_cache[m] = (ks, cum)
        return tab

    def split_table(self, j: int, m: int):
        key = (j, m)
        tab = self._split_cache.get(key)
        if tab is None:
            rest = self.S[j - 1, m - 1 : j - 2 : -1] if j > 2 else self.a[m - 1 : 0 : -1]
            cum = np.cumsum(self.a[1 : m - j + 2] * rest)
            cum /= cum[-1]
            cum[-1] = 2.0
            tab = cum.tolist() if m <= 256 else cum
            if m <= self.CACHE_M:
                self._split_cache[key] = tab
        return tab

    def _children(self, m: int, rng: random.Random) -> list[int]:
        rand = rng.random
        if len(self.degrees) == 1:
            k = self.degrees[0]
        else:
            tab = self._deg_cache.get(m) or self.degree_table(m)
            k = tab[0][bisect_right(tab[1], rand())]
        cache = self._split_cache
        sizes = []
        rest = m
        for j in range(k, 1, -1):
            tab = cache.get((j, rest))
            if tab is None:
                tab = self.split_table(j, rest)
            if type(tab) is list:
                x = bisect_right(tab, rand()) + 1
            else:
                x = int(tab.searchsorted(rand(), "right")) + 1
            sizes.append(x)
            rest -= x
        sizes.append(rest)
        return sizes

    def _check(self, n: int) -> None:
        if n < 1 or n > self.nmax:
            raise SamplingError(f"size {n} outside 1..{self.nmax}")
        if self.a[n] == 0:
            raise SamplingError(f"no tree with {n} leaves has positive weight")

    def sample_degrees(self, n: int, rng: random.Random) -> list[int]:
        self._check(n)
        degs: list[int] = []
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                degs.append(0)
                continue
            sizes = self._children(m, rng)
            degs.append(len(sizes))
            stack.extend(reversed(sizes))
        return degs

    def sample(self, n: int, rng: random.Random) -> Tree:
        return from_preorder_degrees(self.sample_degrees(n, rng))

    def sample_profiles(self, n: int, rng: random.Random) -> tuple[list[int], list[int]]:
        """(leaves per height, vertices per height) of one sampled tree."""
        self._check(n)
        leaf_h = [0] * (n + 1)
        node_h = [0] * (n + 1)
        stack = [(n, 0)]
        children = self._children
        while stack:
            m, d = stack.pop()
            node_h[d] += 1
            if m == 1:
                leaf_h[d] += 1
                continue
            d1 = d + 1
            for x in children(m, rng):
                if x == 1:
                    node_h[d1] += 1
                    leaf_h[d1] += 1
                else:
                    stack.append((x, d1))
        top = max(i for i, v in enumerate(node_h) if v)
        return leaf_h[: top + 1], node_h[: top + 1]


_tables: dict[int, TableSampler] = {}


def table_sampler(ws: WeightSeq, n: int) -> TableSampler:
    s = _tables.get(id(ws))
    if s is None or s.ws is not ws or s.nmax < n:
        s = _tables[id(ws)] = TableSampler(ws, max(n, 64))
    return s
