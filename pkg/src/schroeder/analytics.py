"""Characteristic system, singularity constants and limit-law reference curves.

All arithmetic runs in mpmath at ``weights.DPS`` digits; r^(-n) is handled in
log space so coefficient asymptotics work for any n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .counting import series_c
from .measures import offspring_from_weights
from .weights import DPS, Family, WeightError, WeightSeq, family


class SolverDomainError(ValueError):
    """The characteristic system has no usable positive solution."""


def solve_characteristic(ws: WeightSeq, tol: float = 1e-40) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Positive solution (r, s) of s = zeta_0 r + G(s), G'(s) = 1.

    G' is increasing on the positive axis, so a bracket [1e-6, s_hi] is grown
    until G'(s_hi) > 1 and the root is polished by safeguarded Newton steps.
    When G has a finite radius R the bracket stops at R (1 - 1/64): roots
    closer to the boundary than that are reported as a domain error.
    """
    try:
        return _solve(ws, tol)
    except WeightError as e:
        raise SolverDomainError(str(e)) from None


def _solve(ws: WeightSeq, tol: float) -> tuple[mpmath.mpf, mpmath.mpf]:
    with mpmath.workdps(DPS):
        f = lambda x: ws.G(x, 1) - 1  # noqa: E731
        lo = mpmath.mpf("1e-6")
        if f(lo) >= 0:
            raise SolverDomainError("G'(0+) >= 1: no positive solution")
        radius = ws.radius
        limit = mpmath.inf if math.isinf(radius) else mpmath.mpf(radius) * (1 - mpmath.mpf(1) / 64)
        hi = mpmath.mpf(1) if radius > 2 else mpmath.mpf(radius) / 2
        for _ in range(4000):
            if f(hi) > 0:
                break
            if hi >= limit:
                raise SolverDomainError("G' stays below 1 on its disc of convergence")
            lo = hi
            hi = min(hi * 2, limit)
        else:
            raise SolverDomainError("no sign change of G'(s) - 1 found")
        s = (lo + hi) / 2
        for _ in range(500):
            fs = f(s)
            if abs(fs) < mpmath.mpf(10) ** (-DPS + 5):
                break
            if fs > 0:
                hi = s
            else:
                lo = s
            step = s - fs / ws.G(s, 2)
            s = step if lo < step < hi else (lo + hi) / 2
        r = (s - ws.G(s)) / (mpmath.mpf(ws[0].numerator) / ws[0].denominator)
        if abs(f(s)) >= tol or abs(s - ws[0] * r - ws.G(s)) >= tol:
            raise SolverDomainError("characteristic system residuals above tolerance")
        if r <= 0:
            raise SolverDomainError("non-positive radius")
        return r, s


@dataclass(frozen=True)
class CharacteristicSolution:
    r: mpmath.mpf
    s: mpmath.mpf
    g2: mpmath.mpf  # G''(s)
    gamma: mpmath.mpf
    sigma2: mpmath.mpf
    xi0: mpmath.mpf
    lam: mpmath.mpf
    height_const: mpmath.mpf
    scaling_const: mpmath.mpf

    def as_dict(self) -> dict[str, mpmath.mpf]:
        return {
            "r": self.r,
            "s": self.s,
            "gamma": self.gamma,
            "sigma2": self.sigma2,
            "lambda": self.lam,
            "heightConst": self.height_const,
            "scalingConst": self.scaling_const,
        }


def derive_constants(ws: WeightSeq, r, s) -> CharacteristicSolution:
    with mpmath.workdps(DPS):
        r, s = mpmath.mpf(r), mpmath.mpf(s)
        g2 = ws.G(s, 2)
        if g2 <= 0:
            raise SolverDomainError("G''(s) must be positive")
        zeta0 = mpmath.mpf(ws[0].numerator) / ws[0].denominator
        xi = offspring_from_weights(ws, r, s)
        sigma2 = xi.variance
        xi0 = xi[0]
        return CharacteristicSolution(
            r=r,
            s=s,
            g2=g2,
            gamma=mpmath.sqrt(2 * r * zeta0 / g2),
            sigma2=sigma2,
            xi0=xi0,
            lam=mpmath.sqrt(g2 * r),
            height_const=mpmath.sqrt(mpmath.pi / (2 * r * g2)),
            scaling_const=2 / (mpmath.sqrt(sigma2) * mpmath.sqrt(xi0)),
        )


_constants: dict[int, tuple[WeightSeq, CharacteristicSolution]] = {}


def characteristic(f: Family | str | WeightSeq) -> CharacteristicSolution:
    """Cached solve + derive for a family or weight sequence."""
    ws = f if isinstance(f, WeightSeq) else family(f).weights
    hit = _constants.get(id(ws))
    if hit is None or hit[0] is not ws:
        r, s = solve_characteristic(ws)
        hit = _constants[id(ws)] = (ws, derive_constants(ws, r, s))
    return hit[1]


def asymptotic_count_ratio(f: Family | str | WeightSeq, n: int) -> mpmath.mpf:
    """[z^n]C divided by gamma r^(-n) / (2 sqrt(pi n^3)); tends to 1."""
    ws = f if isinstance(f, WeightSeq) else family(f).weights
    c = series_c(ws, n)[n]
    if c <= 0:
        raise ValueError(f"no trees with {n} leaves")
    sol = characteristic(ws)
    with mpmath.workdps(DPS):
        log_exact = mpmath.log(c.numerator) - mpmath.log(c.denominator)
        log_asym = mpmath.log(sol.gamma) - n * mpmath.log(sol.r) - mpmath.log(2) - (mpmath.log(mpmath.pi) + 3 * mpmath.log(n)) / 2
        return mpmath.exp(log_exact - log_asym)


# -- reference curves ----------------------------------------------------------


def rayleigh_pdf(x: float, scale: float = 1.0) -> float:
    if x < 0:
        return 0.0
    return x / scale**2 * math.exp(-(x * x) / (2 * scale**2))


def rayleigh_cdf(x: float, scale: float = 1.0) -> float:
    if x <= 0:
        return 0.0
    return -math.expm1(-(x * x) / (2 * scale**2))


def leaf_profile_asymptote(f, k: int) -> mpmath.mpf:
    """Limit of the expected number of leaves at height k: G''(s) r k."""
    sol = characteristic(f)
    return sol.g2 * sol.r * k


def node_profile_asymptote(f, k: int) -> mpmath.mpf:
    """Limit of the expected number of vertices at height k: s G''(s) k + 1."""
    sol = characteristic(f)
    return sol.s * sol.g2 * k + 1
