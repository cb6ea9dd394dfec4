"""Exact truncated power series over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class TruncatedSeries:
    """Coefficients c_0..c_N of a formal power series, known exactly up to z^N.

    All operations are exact and return prefixes valid to the smaller of the
    operand orders.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is not None:
            cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls([], order)

    @classmethod
    def z(cls, order: int) -> TruncatedSeries:
        return cls([0, 1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond truncation order {self.order}")
        return self.coeffs[n] if n >= 0 else Fraction(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        body = " + ".join(f"({c})z^{i}" for i, c in enumerate(self.coeffs) if c)
        return f"TruncatedSeries({body or '0'}; O(z^{self.order + 1}))"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1])

    def _coerce(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries([other], self.order)

    def __add__(self, other) -> TruncatedSeries:
        o = self._coerce(other)
        n = min(self.order, o.order)
        return TruncatedSeries([self.coeffs[i] + o.coeffs[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries([-c for c in self.coeffs])

    def __sub__(self, other) -> TruncatedSeries:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TruncatedSeries:
        return self._coerce(other) - self

    def __mul__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            k = Fraction(other)
            return TruncatedSeries([k * c for c in self.coeffs])
        n = min(self.order, other.order)
        return TruncatedSeries(convolve(self.coeffs, other.coeffs, n))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> TruncatedSeries:
        if k < 0:
            raise ValueError("negative powers are not supported; use reciprocal()")
        result = TruncatedSeries([1], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_z(self, shift: int = 1) -> TruncatedSeries:
        """Multiply by z^shift, keeping the same truncation order."""
        return TruncatedSeries([0] * shift + list(self.coeffs[: self.order + 1 - shift]))

    def derivative(self) -> TruncatedSeries:
        """d/dz; the result is exact only up to order N-1."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 prefix carries no information")
        return TruncatedSeries([i * self.coeffs[i] for i in range(1, self.order + 1)])

    def reciprocal(self) -> TruncatedSeries:
        a0 = self.coeffs[0]
        if a0 == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        out = [1 / a0]
        for n in range(1, self.order + 1):
            s = sum(self.coeffs[i] * out[n - i] for i in range(1, n + 1))
            out.append(-s / a0)
        return TruncatedSeries(out)

    def __truediv__(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return self * (1 / Fraction(other))

    def compose(self, inner: TruncatedSeries) -> TruncatedSeries:
        """self(inner(z)); inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        result = TruncatedSeries([self.coeffs[n]], n)
        inner = inner.truncate(n)
        for i in range(n - 1, -1, -1):
            result = result * inner + self.coeffs[i]
        return result


def convolve(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    """Coefficients 0..n of the product of two coefficient sequences."""
    out = []
    for m in range(n + 1):
        lo = max(0, m - len(b) + 1)
        hi = min(m, len(a) - 1)
        out.append(sum((a[i] * b[m - i] for i in range(lo, hi + 1) if a[i]), Fraction(0)))
    return out
