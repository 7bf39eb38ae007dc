"""Piecewise-affine functions and divisors on real intervals.

A :class:`PiecewiseAffine` is stored as (domain, breakpoints, slopes, anchor):
the value anywhere is recovered by integrating the slopes from the anchor, so
continuity holds by construction.  Rational data (``int``/``Fraction``) stay
exact through every operation; ``float`` data are accepted and propagate as
floats.

The divisor of ``f`` is its distributional second derivative, i.e. the atoms
``f'(x+) - f'(x-)`` at the breakpoints.
"""
from __future__ import annotations

import bisect
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from tropos.errors import DomainError, PreconditionError

Number = Union[Fraction, float]

INF = math.inf

__all__ = [
    "Divisor",
    "PiecewiseAffine",
    "add",
    "affine",
    "as_number",
    "evaluate",
    "format_number",
    "degree_between",
    "laplacian",
    "max_of_lines",
    "pointwise_max",
    "rr_solve",
    "scale_argument",
]


def as_number(x) -> Number:
    """Coerce ``x`` to the exact-or-float number model used here.

    Integers and ``"p/q"`` strings become :class:`Fraction`; floats stay
    floats; ``"inf"``/``"-inf"`` become float infinities.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        try:
            return Fraction(s)
        except ValueError:
            return float(s)
    if isinstance(x, numbers.Rational):
        return Fraction(x)
    return float(x)


def format_number(x: Number):
    """JSON encoding: rationals as ``"p/q"`` strings, floats as numbers."""
    if isinstance(x, Fraction):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _piece_points(domain, cuts) -> list:
    a, b = domain
    edges = [a, *cuts, b]
    pts = []
    for lo, hi in zip(edges, edges[1:]):
        if math.isinf(lo) and math.isinf(hi):
            pts.append(Fraction(0))
        elif math.isinf(lo):
            pts.append(hi - 1)
        elif math.isinf(hi):
            pts.append(lo + 1)
        else:
            pts.append((lo + hi) / 2)
    return pts


def _div(x: Number, n) -> Number:
    if isinstance(x, float):
        return x / n
    return x / Fraction(n)


@dataclass(frozen=True)
class Divisor:
    """Finite signed atomic measure ``sum n_j delta_{lambda_j}``.

    Atoms are kept sorted by position, with duplicates merged and zero
    multiplicities dropped.
    """

    atoms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for pos, mult in self.atoms:
            pos, mult = as_number(pos), as_number(mult)
            merged[pos] = merged.get(pos, 0) + mult
        atoms = tuple(sorted((p, m) for p, m in merged.items() if m != 0))
        object.__setattr__(self, "atoms", atoms)

    @property
    def degree(self) -> Number:
        return sum((m for _, m in self.atoms), Fraction(0))

    @property
    def positions(self) -> list:
        return [p for p, _ in self.atoms]

    def is_effective(self) -> bool:
        return all(m >= 0 for _, m in self.atoms)

    def is_integral(self) -> bool:
        return all(isinstance(m, Fraction) and m.denominator == 1 for _, m in self.atoms)

    def multiplicity(self, pos) -> Number:
        return dict(self.atoms).get(as_number(pos), Fraction(0))

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.atoms + other.atoms)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((p, -m) for p, m in self.atoms))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __len__(self) -> int:
        return len(self.atoms)

    def scale(self, c) -> "Divisor":
        """Multiply every multiplicity by ``c``."""
        c = as_number(c)
        return Divisor(tuple((p, m * c) for p, m in self.atoms))

    def pushforward_div(self, n: int) -> "Divisor":
        """Image under ``lambda -> lambda / n``."""
        return Divisor(tuple((_div(p, n), m) for p, m in self.atoms))

    def restrict(self, lo, hi, closed: bool = False) -> "Divisor":
        """Atoms inside ``(lo, hi)`` (or ``[lo, hi]`` when ``closed``)."""
        if closed:
            keep = [(p, m) for p, m in self.atoms if lo <= p <= hi]
        else:
            keep = [(p, m) for p, m in self.atoms if lo < p < hi]
        return Divisor(tuple(keep))

    def to_json(self) -> dict:
        return {"atoms": [[format_number(p), format_number(m)] for p, m in self.atoms]}

    @classmethod
    def from_json(cls, data: dict) -> "Divisor":
        return cls(tuple((p, m) for p, m in data["atoms"]))


@dataclass(frozen=True)
class PiecewiseAffine:
    """Continuous piecewise-affine function on an open interval.

    Parameters
    ----------
    domain : (a, b)
        Open interval; ``a`` may be ``-inf`` and ``b`` may be ``inf``.
    breakpoints : sequence
        Strictly increasing points inside the domain.
    slopes : sequence
        ``len(breakpoints) + 1`` slopes, left to right.
    anchor : (x0, v0)
        Any point and the value of the function there (``x0`` need not be
        inside the domain; the affine pieces extend).  It is stored in
        canonical form: at the first breakpoint, or at ``x = 0``.

    Redundant breakpoints (equal adjacent slopes) are removed on construction.
    """

    domain: tuple
    breakpoints: tuple
    slopes: tuple
    anchor: tuple

    def __post_init__(self):
        a, b = (as_number(v) for v in self.domain)
        if not a < b:
            raise PreconditionError(f"empty domain ({a}, {b})")
        bps = [as_number(v) for v in self.breakpoints]
        slopes = [as_number(v) for v in self.slopes]
        if len(slopes) != len(bps) + 1:
            raise PreconditionError("need exactly one more slope than breakpoints")
        for left, right in zip(bps, bps[1:]):
            if not left < right:
                raise PreconditionError("breakpoints must be strictly increasing")
        if bps and not (a < bps[0] and bps[-1] < b):
            raise PreconditionError("breakpoints must lie inside the domain")
        keep_b, keep_s = [], [slopes[0]]
        for x, s in zip(bps, slopes[1:]):
            if s == keep_s[-1]:
                continue
            keep_b.append(x)
            keep_s.append(s)
        x0, v0 = (as_number(v) for v in self.anchor)
        object.__setattr__(self, "domain", (a, b))
        object.__setattr__(self, "breakpoints", tuple(keep_b))
        object.__setattr__(self, "slopes", tuple(keep_s))
        object.__setattr__(self, "anchor", (x0, v0))
        # values at breakpoints, integrated out from the anchor
        i0 = bisect.bisect_right(keep_b, x0)
        vals = [None] * len(keep_b)
        if keep_b:
            prev_x, prev_v = x0, v0
            for i in range(i0, len(keep_b)):
                prev_v = prev_v + keep_s[i] * (keep_b[i] - prev_x)
                prev_x = keep_b[i]
                vals[i] = prev_v
            prev_x, prev_v = x0, v0
            for i in range(i0 - 1, -1, -1):
                prev_v = prev_v - keep_s[i + 1] * (prev_x - keep_b[i])
                prev_x = keep_b[i]
                vals[i] = prev_v
        # canonical anchor, so equal functions compare equal
        if keep_b:
            object.__setattr__(self, "anchor", (keep_b[0], vals[0]))
        else:
            object.__setattr__(self, "anchor", (0 * x0, v0 - keep_s[0] * x0))
        object.__setattr__(self, "_values", tuple(vals))

    # -- queries -------------------------------------------------------------

    def __call__(self, x) -> Number:
        return evaluate(self, x)

    def slope_at(self, x) -> Number:
        """Right derivative at ``x``."""
        return self.slopes[bisect.bisect_right(self.breakpoints, as_number(x))]

    def left_slope_at(self, x) -> Number:
        return self.slopes[bisect.bisect_left(self.breakpoints, as_number(x))]

    def is_convex(self) -> bool:
        return all(s <= t for s, t in zip(self.slopes, self.slopes[1:]))

    def has_integral_slopes(self) -> bool:
        return all(isinstance(s, Fraction) and s.denominator == 1 for s in self.slopes)

    def sample_points(self) -> list:
        """One representative point inside each affine piece."""
        return _piece_points(self.domain, self.breakpoints)

    def restrict(self, lo, hi) -> "PiecewiseAffine":
        """Same function on the sub-interval ``(lo, hi)``."""
        lo, hi = as_number(lo), as_number(hi)
        a, b = self.domain
        if lo < a or hi > b:
            raise DomainError(f"({lo}, {hi}) is not inside ({a}, {b})")
        i = bisect.bisect_right(self.breakpoints, lo)
        j = bisect.bisect_left(self.breakpoints, hi)
        return PiecewiseAffine((lo, hi), self.breakpoints[i:j], self.slopes[i : j + 1], self.anchor)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "domain": [format_number(v) for v in self.domain],
            "breakpoints": [format_number(v) for v in self.breakpoints],
            "slopes": [format_number(v) for v in self.slopes],
            "anchor": [format_number(v) for v in self.anchor],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseAffine":
        return cls(tuple(data["domain"]), tuple(data["breakpoints"]), tuple(data["slopes"]), tuple(data["anchor"]))


def affine(slope, x0=0, v0=0, domain=(-INF, INF)) -> PiecewiseAffine:
    """Globally affine function through ``(x0, v0)``."""
    return PiecewiseAffine(domain, (), (slope,), (x0, v0))


def evaluate(f: PiecewiseAffine, x) -> Number:
    x = as_number(x)
    a, b = f.domain
    if not a < x < b:
        raise DomainError(f"x={x} outside the domain ({a}, {b})")
    bps = f.breakpoints
    if not bps:
        x0, v0 = f.anchor
        return v0 + f.slopes[0] * (x - x0)
    i = bisect.bisect_right(bps, x)
    if i == 0:
        return f._values[0] + f.slopes[0] * (x - bps[0])
    return f._values[i - 1] + f.slopes[i] * (x - bps[i - 1])


def laplacian(f: PiecewiseAffine) -> Divisor:
    """Slope jumps ``f'(x+) - f'(x-)`` at the breakpoints."""
    return Divisor(tuple((x, t - s) for x, s, t in zip(f.breakpoints, f.slopes, f.slopes[1:])))


def scale_argument(f: PiecewiseAffine, n: int) -> PiecewiseAffine:
    """The function ``x -> f(n x)``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise PreconditionError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    a, b = f.domain
    x0, v0 = f.anchor
    return PiecewiseAffine(
        (_div(a, n), _div(b, n)),
        tuple(_div(x, n) for x in f.breakpoints),
        tuple(s * n for s in f.slopes),
        (_div(x0, n), v0),
    )


def _check_same_domain(f, g):
    if f.domain != g.domain:
        raise DomainError(f"domain mismatch: {f.domain} vs {g.domain}")


def add(f: PiecewiseAffine, g: PiecewiseAffine) -> PiecewiseAffine:
    """Pointwise sum (tropical product)."""
    _check_same_domain(f, g)
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    pts = _piece_points(f.domain, bps)
    slopes = [f.slope_at(x) + g.slope_at(x) for x in pts]
    x0 = pts[0]
    return PiecewiseAffine(f.domain, tuple(bps), tuple(slopes), (x0, f(x0) + g(x0)))


def pointwise_max(f: PiecewiseAffine, g: PiecewiseAffine) -> PiecewiseAffine:
    """Pointwise maximum (tropical sum); crossings become new breakpoints."""
    _check_same_domain(f, g)
    a, b = f.domain
    merged = sorted(set(f.breakpoints) | set(g.breakpoints))
    edges = [a, *merged, b]
    cuts = set(merged)
    for (lo, hi), x in zip(zip(edges, edges[1:]), _piece_points(f.domain, merged)):
        ds = f.slope_at(x) - g.slope_at(x)
        if ds == 0:
            continue
        # f - g is affine on (lo, hi): d(x) + ds * (y - x)
        cross = x - (f(x) - g(x)) / ds
        if lo < cross < hi:
            cuts.add(cross)
    cuts = sorted(cuts)
    pts = _piece_points(f.domain, cuts)
    slopes = []
    for x in pts:
        fx, gx = f(x), g(x)
        slopes.append(f.slope_at(x) if fx > gx else g.slope_at(x) if gx > fx else max(f.slope_at(x), g.slope_at(x)))
    x0 = pts[0]
    return PiecewiseAffine(f.domain, tuple(cuts), tuple(slopes), (x0, max(f(x0), g(x0))))


def max_of_lines(lines: Iterable[tuple], domain=(-INF, INF)) -> PiecewiseAffine:
    """Upper envelope of affine functions given as ``(slope, intercept)``."""
    lines = list(lines)
    if not lines:
        raise PreconditionError("need at least one line")
    out = None
    for s, c in lines:
        h = PiecewiseAffine(domain, (), (s,), (0, c))
        out = h if out is None else pointwise_max(out, h)
    return out


def rr_solve(D: Divisor, domain=(-INF, INF)) -> PiecewiseAffine:
    """Solve ``D + Delta(f) >= 0`` with integral slopes.

    Uses ``f(x) = sum_{n_j < 0} (-n_j) max(0, x - lambda_j)``, which cancels
    every pole exactly and leaves the positive part of ``D`` untouched.
    """
    if not D.is_integral():
        raise PreconditionError("Riemann-Roch in characteristic one needs integer multiplicities")
    a, b = (as_number(v) for v in domain)
    for pos, _ in D.atoms:
        if not a < pos < b:
            raise DomainError(f"atom at {pos} outside ({a}, {b})")
    poles = [(p, -m) for p, m in D.atoms if m < 0]
    if not poles:
        return PiecewiseAffine((a, b), (), (0,), (0, 0))
    slopes = [Fraction(0)]
    for _, k in poles:
        slopes.append(slopes[-1] + k)
    return PiecewiseAffine((a, b), tuple(p for p, _ in poles), tuple(slopes), (poles[0][0], 0))


def degree_between(f: PiecewiseAffine, lo, hi) -> Number:
    """Total multiplicity of the divisor of ``f`` on the closed ``[lo, hi]``."""
    return laplacian(f).restrict(as_number(lo), as_number(hi), closed=True).degree


def from_slopes(domain, breakpoints: Sequence, slopes: Sequence, anchor) -> PiecewiseAffine:
    return PiecewiseAffine(tuple(domain), tuple(breakpoints), tuple(slopes), tuple(anchor))
