"""Out-degree weight sequences and the four bracketing families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping

import mpmath

# Working precision (decimal digits) for every irrational quantity in the package.
DPS = 60


class Flavor(Enum):
    ORDERED = "ordered"  # ordinary generating functions, plane trees
    LABELED = "labeled"  # exponential generating functions, leaf-labeled unordered trees


class WeightError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("weights must be exact (int, Fraction or str), not float")
    return Fraction(x)


class WeightSeq:
    """A weight sequence zeta_0, zeta_1, ... given by a finite table and an optional rule.

    ``table[i]`` is used for ``i < len(table)``; beyond the table ``rule(i)`` is
    used, or zero when there is no rule. ``radius`` is the radius of
    convergence of ``G(w) = sum_{k>=2} g_k w^k`` (see ``g``); it only matters for
    the numeric routines and defaults to infinity (entire ``G``).

    Instances compare and hash by identity, which is what the caches rely on.
    """

    def __init__(
        self,
        table: Mapping[int, object] | list,
        flavor: Flavor,
        rule: Callable[[int], Fraction] | None = None,
        radius: float = math.inf,
        name: str | None = None,
    ):
        if isinstance(table, Mapping):
            size = max(table) + 1 if table else 0
            vals = [Fraction(0)] * size
            for k, v in table.items():
                vals[k] = _frac(v)
        else:
            vals = [_frac(v) for v in table]
        self._table = tuple(vals)
        self.flavor = flavor
        self.rule = rule
        self.radius = radius
        self.name = name or "custom"
        if any(v < 0 for v in self._table):
            raise WeightError("weights must be non-negative")
        if self[0] <= 0:
            raise WeightError("zeta_0 must be positive")
        if self[1] != 0:
            # with zeta_1 > 0 the weighted sums over unary chains need not be finite
            raise WeightError("zeta_1 must be 0")

    def __repr__(self) -> str:
        return f"WeightSeq({self.name}, {self.flavor.value})"

    def __getitem__(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        if i < len(self._table):
            return self._table[i]
        if self.rule is None:
            return Fraction(0)
        v = _frac(self.rule(i))
        if v < 0:
            raise WeightError(f"negative weight at index {i}")
        return v

    @property
    def labeled(self) -> bool:
        return self.flavor is Flavor.LABELED

    @property
    def max_degree(self) -> int | None:
        """Largest index with a non-zero weight, or None for an infinite rule."""
        if self.rule is not None:
            return None
        nz = [i for i, v in enumerate(self._table) if v]
        return max(nz)

    def g(self, k: int) -> Fraction:
        """Coefficient of w^k in G: zeta_k for ordered, zeta_k/k! for labeled families."""
        z = self[k]
        return z / math.factorial(k) if self.labeled else z

    def support(self, upto: int) -> list[int]:
        """Degrees k in 2..upto with zeta_k != 0."""
        top = upto if self.max_degree is None else min(upto, self.max_degree)
        return [k for k in range(2, top + 1) if self[k]]

    def check_restricted(self, probe: int = 64) -> None:
        """zeta_0 = 1, zeta_1 = 0 and gcd of the support equal to 1.

        For an infinite rule only indices below ``probe`` enter the gcd.
        """
        if self[0] != 1:
            raise WeightError("zeta_0 must equal 1")
        ks = [k for k in range(0, probe if self.max_degree is None else self.max_degree + 1) if self[k]]
        if math.gcd(*ks) != 1:
            raise WeightError("gcd of {k : zeta_k != 0} must be 1")

    # -- numerics -------------------------------------------------------

    def G(self, w, deriv: int = 0):
        """d^deriv/dw^deriv of G(w) = sum_{k>=2} g_k w^k, in mpmath at DPS digits."""
        with mpmath.workdps(DPS):
            w = mpmath.mpf(w)
            if w >= self.radius:
                raise WeightError(f"G evaluated outside its disc of convergence (w={w})")
            top = self.max_degree
            total = mpmath.mpf(0)
            eps = mpmath.mpf(10) ** (-DPS - 5)
            k = max(2, deriv)
            small = 0
            while True:
                if top is not None and k > top:
                    return total
                gk = self.g(k)
                if gk:
                    term = mpmath.mpf(gk.numerator) / gk.denominator * mpmath.ff(k, deriv) * w ** (k - deriv)
                    total += term
                    small = small + 1 if abs(term) <= eps * abs(total) else 0
                else:
                    small += 1
                if top is None and small >= 8 and k > 4:
                    return total
                k += 1
                if k > 200000:
                    raise WeightError("G did not converge")

    def tilt(self, a, b) -> WeightSeq:
        """zeta~_0 = a zeta_0 and zeta~_i = b^(i-1) zeta_i; every n-leaf weight scales by a^n b^(n-1)."""
        a, b = _frac(a), _frac(b)
        if a <= 0 or b <= 0:
            raise WeightError("tilt parameters must be positive")
        table = [self[0] * a] + [self[i] * b ** (i - 1) for i in range(1, len(self._table))]
        rule = None
        if self.rule is not None:
            old = self.rule
            rule = lambda i: old(i) * b ** (i - 1)  # noqa: E731
        return WeightSeq(table, self.flavor, rule, self.radius / float(b), f"tilt({self.name},{a},{b})")


def _one(i: int) -> Fraction:
    return Fraction(1)


@dataclass(frozen=True)
class Family:
    name: str
    weights: WeightSeq
    description: str = ""

    @property
    def labeled(self) -> bool:
        return self.weights.labeled

    @property
    def binary(self) -> bool:
        return self.weights.max_degree == 2


P1 = Family("P1", WeightSeq({0: 1, 2: 1}, Flavor.ORDERED, name="P1"), "binary word bracketings")
P2 = Family(
    "P2",
    WeightSeq([1, 0], Flavor.ORDERED, rule=_one, radius=1.0, name="P2"),
    "general word bracketings",
)
P3 = Family("P3", WeightSeq({0: 1, 2: 1}, Flavor.LABELED, name="P3"), "binary set bracketings")
P4 = Family("P4", WeightSeq([1, 0], Flavor.LABELED, rule=_one, name="P4"), "general set bracketings")

FAMILIES = {f.name: f for f in (P1, P2, P3, P4)}


def family(name: str | Family) -> Family:
    if isinstance(name, Family):
        return name
    try:
        return FAMILIES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None


def custom(weights: WeightSeq) -> Family:
    return Family(weights.name, weights, "custom weights")
