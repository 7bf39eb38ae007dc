"""Non-archimedean tropicalization through Newton polygons.

Valuations are normalized so that ``v(p) = 1``; the absolute value
``|x| = p**(-v(x))`` only rescales the real line by ``log p``, which keeps
every breakpoint rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from tropos.errors import PreconditionError
from tropos.pwa import INF, Divisor, PiecewiseAffine, as_number, format_number

__all__ = [
    "ValuedSeries",
    "lower_hull",
    "padic_valuation",
    "root_valuations",
    "series_product_valuations",
    "substitute_power",
    "tropicalize_na",
]


def padic_valuation(x, p: int) -> Fraction | None:
    """``v_p(x)`` for a rational ``x``; ``None`` stands for ``v(0) = +inf``."""
    x = Fraction(x)
    if x == 0:
        return None
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return Fraction(v)


@dataclass(frozen=True)
class ValuedSeries:
    """Finite Laurent data ``n -> v(a_n)`` with an x-interval.

    Zero coefficients (valuation ``+inf``) are simply absent from ``coeffs``.
    ``annulus`` is the interval ``(-log r2, -log r1)`` of the tropical
    variable.  ``poly`` optionally keeps the rational coefficients the
    valuations were computed from.
    """

    p: int
    coeffs: Mapping
    annulus: tuple = (-INF, INF)
    poly: Mapping | None = field(default=None, compare=False)

    def __post_init__(self):
        coeffs = {}
        for n, v in dict(self.coeffs).items():
            if v is None or (isinstance(v, str) and v.strip().lower() in ("inf", "+inf")):
                continue
            v = as_number(v)
            if isinstance(v, float) and math.isinf(v):
                continue
            coeffs[int(n)] = v
        if not coeffs:
            raise PreconditionError("series has no nonzero coefficient")
        lo, hi = (as_number(a) for a in self.annulus)
        if not lo < hi:
            raise PreconditionError(f"empty annulus interval ({lo}, {hi})")
        object.__setattr__(self, "coeffs", dict(sorted(coeffs.items())))
        object.__setattr__(self, "annulus", (lo, hi))

    @classmethod
    def from_polynomial(cls, coeffs, p: int, annulus=(-INF, INF)) -> "ValuedSeries":
        """From rational coefficients, as a list (index = exponent) or a dict."""
        if not isinstance(coeffs, Mapping):
            coeffs = dict(enumerate(coeffs))
        poly = {int(n): Fraction(c) for n, c in coeffs.items() if Fraction(c) != 0}
        vals = {n: padic_valuation(c, p) for n, c in poly.items()}
        return cls(p, vals, annulus, poly)

    @property
    def is_polynomial(self) -> bool:
        return min(self.coeffs) >= 0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "coeffs": [[n, format_number(v)] for n, v in self.coeffs.items()],
            "annulus": [format_number(a) for a in self.annulus],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ValuedSeries":
        if "poly" in data:
            return cls.from_polynomial({int(n): Fraction(c) for n, c in data["poly"]}, int(data["p"]),
                                       tuple(data.get("annulus", ("-inf", "inf"))))
        return cls(int(data["p"]), {int(n): v for n, v in data["coeffs"]},
                   tuple(data.get("annulus", ("-inf", "inf"))))


def lower_hull(points) -> list:
    """Lower convex hull (monotone chain), collinear interior points dropped."""
    pts = sorted(points)
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it turns strictly left (counter-clockwise)
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def tropicalize_na(s: ValuedSeries) -> PiecewiseAffine:
    """``x -> max_n (-n x - v(a_n))`` on the annulus interval."""
    hull = lower_hull(list(s.coeffs.items()))
    # segment (n_i, v_i)-(n_{i+1}, v_{i+1}) switches dominance at x = -slope
    bps, slopes = [], [Fraction(-hull[-1][0])]
    for (n1, v1), (n2, v2) in reversed(list(zip(hull, hull[1:]))):
        bps.append((v1 - v2) / (n2 - n1))
        slopes.append(Fraction(-n1))
    n0, v0 = hull[0]
    # right of every breakpoint the lowest exponent dominates
    right = (bps[-1] + 1) if bps else Fraction(0)
    full = PiecewiseAffine((-INF, INF), tuple(bps), tuple(slopes), (right, -n0 * right - v0))
    lo, hi = s.annulus
    return full.restrict(lo, hi) if (lo, hi) != (-INF, INF) else full


def root_valuations(s: ValuedSeries) -> Divisor:
    """Multiset of root valuations read from the Newton polygon segments.

    A lower-hull segment of slope ``m`` and width ``l`` contributes ``l``
    roots of valuation ``-m``.  Only roots inside the annulus are kept.
    """
    if not s.is_polynomial:
        raise PreconditionError("root_valuations needs a polynomial (no negative exponents)")
    hull = lower_hull(list(s.coeffs.items()))
    atoms = [(-(v2 - v1) / (n2 - n1), n2 - n1) for (n1, v1), (n2, v2) in zip(hull, hull[1:])]
    lo, hi = s.annulus
    return Divisor(tuple(atoms)).restrict(lo, hi)


def _poly_mul(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {n: c for n, c in out.items() if c != 0}


def series_product_valuations(s: ValuedSeries, t: ValuedSeries) -> ValuedSeries:
    """Exact product of two polynomial-backed series, re-valued."""
    if s.p != t.p:
        raise PreconditionError(f"prime mismatch: {s.p} vs {t.p}")
    if s.poly is None or t.poly is None:
        raise PreconditionError("product needs polynomial-backed inputs")
    lo = max(s.annulus[0], t.annulus[0])
    hi = min(s.annulus[1], t.annulus[1])
    return ValuedSeries.from_polynomial(_poly_mul(s.poly, t.poly), s.p, (lo, hi))


def substitute_power(s: ValuedSeries, n: int) -> ValuedSeries:
    """``f(X) -> f(X**n)``: exponents times ``n``, annulus interval over ``n``."""
    if int(n) != n or n < 1:
        raise PreconditionError("n must be a positive integer")
    lo, hi = s.annulus
    ann = tuple(a / n if isinstance(a, float) else a / Fraction(n) for a in (lo, hi))
    poly = None if s.poly is None else {k * n: c for k, c in s.poly.items()}
    return ValuedSeries(s.p, {k * n: v for k, v in s.coeffs.items()}, ann, poly)
