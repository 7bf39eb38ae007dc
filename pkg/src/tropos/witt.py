"""Witt coefficients in characteristic one.

``W`` is the complex group ring of the multiplicative positive reals: finite
sums ``sum c_j [r_j]`` with ``[x][y] = [xy]``.  Indices are kept exact as
``prod p**e_p * exp(2 pi tau)`` with rational ``e_p`` and ``tau`` so that
``theta_lambda`` (``[x] -> [x**lambda]``) and products never merge or split
indices through rounding; floats appear only when a character
``chi_lambda([x]) = x**lambda`` is evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
import sympy

from tropos.errors import PreconditionError

__all__ = [
    "LeafGridFunction",
    "WittElement",
    "WittKey",
    "chi",
    "frobenius_lift",
    "holomorphy_residual",
    "q_function",
    "q_grid",
    "teichmuller",
    "theta",
]

TWO_PI = 2.0 * math.pi


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float) and not math.isfinite(x):
        raise PreconditionError(f"non-finite value {x}")
    return Fraction(x)


@dataclass(frozen=True, order=True)
class WittKey:
    """Positive real ``prod p**e_p * exp(2 pi tau)`` with rational data."""

    factors: tuple = ()  # sorted ((p, e_p), ...), e_p != 0
    tau: Fraction = Fraction(0)

    @classmethod
    def from_rational(cls, x) -> "WittKey":
        x = _fraction(x)
        if x <= 0:
            raise PreconditionError(f"index must be positive, got {x}")
        exps: dict = {}
        for p, e in sympy.factorint(x.numerator).items():
            exps[int(p)] = exps.get(int(p), 0) + e
        for p, e in sympy.factorint(x.denominator).items():
            exps[int(p)] = exps.get(int(p), 0) - e
        return cls(tuple(sorted((p, Fraction(e)) for p, e in exps.items() if e)))

    @classmethod
    def exp2pi(cls, tau) -> "WittKey":
        """``exp(2 pi tau)``."""
        return cls((), _fraction(tau))

    def __mul__(self, other: "WittKey") -> "WittKey":
        exps = dict(self.factors)
        for p, e in other.factors:
            exps[p] = exps.get(p, 0) + e
        return WittKey(tuple(sorted((p, e) for p, e in exps.items() if e)), self.tau + other.tau)

    def power(self, lam) -> "WittKey":
        lam = _fraction(lam)
        if lam == 0:
            return WittKey()
        return WittKey(tuple((p, e * lam) for p, e in self.factors), self.tau * lam)

    def log(self) -> float:
        return math.fsum([float(e) * math.log(p) for p, e in self.factors] + [TWO_PI * float(self.tau)])

    def __float__(self) -> float:
        return math.exp(self.log())

    def __str__(self) -> str:
        parts = [f"{p}^{e}" if e != 1 else str(p) for p, e in self.factors]
        if self.tau:
            parts.append(f"e^(2pi*{self.tau})")
        return "*".join(parts) or "1"


def _as_key(x) -> WittKey:
    return x if isinstance(x, WittKey) else WittKey.from_rational(x)


@dataclass(frozen=True)
class WittElement:
    """Finite formal sum ``sum c [r]``; zero coefficients are never stored."""

    terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean: dict = {}
        for k, c in dict(self.terms).items():
            key = _as_key(k)
            clean[key] = clean.get(key, 0) + complex(c)
        object.__setattr__(self, "terms", {k: c for k, c in sorted(clean.items()) if c != 0})

    @classmethod
    def constant(cls, c: complex) -> "WittElement":
        return cls({WittKey(): c})

    def __add__(self, other: "WittElement") -> "WittElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return WittElement(out)

    def __neg__(self):
        return WittElement({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, WittElement):
            return WittElement({k: complex(other) * c for k, c in self.terms.items()})
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 * k2
                out[k] = out.get(k, 0) + c1 * c2
        return WittElement(out)

    def __rmul__(self, scalar):
        return self * scalar

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise PreconditionError("only nonnegative integer powers")
        out = WittElement.constant(1)
        for _ in range(int(n)):
            out = out * self
        return out

    @property
    def keys(self) -> tuple:
        return tuple(self.terms)

    def same_keys(self, other: "WittElement") -> bool:
        return self.keys == other.keys

    def close_to(self, other: "WittElement", tol: float = 1e-12) -> bool:
        """Identical keys and coefficients within ``tol``."""
        return self.same_keys(other) and all(abs(self.terms[k] - other.terms[k]) <= tol for k in self.terms)


def teichmuller(x) -> WittElement:
    """``[x]`` for a positive rational (or a :class:`WittKey`)."""
    return WittElement({_as_key(x): 1})


def _positive(lam, name="lambda") -> Fraction:
    lam = _fraction(lam)
    if lam <= 0:
        raise PreconditionError(f"{name} must be positive")
    return lam


def theta(lam, w: WittElement) -> WittElement:
    """``theta_lambda``: indices ``r -> r**lambda``, coefficients unchanged."""
    lam = _positive(lam)
    return WittElement({k.power(lam): c for k, c in w.terms.items()})


def chi(lam, w: WittElement) -> complex:
    """``chi_lambda(sum c [r]) = sum c r**lambda``."""
    lam = float(_positive(lam))
    return complex(sum(c * math.exp(lam * k.log()) for k, c in w.terms.items()))


def q_function(x: float, y, r=1) -> WittElement:
    """``q(x + iy)**r = [exp(-2 pi r y)] exp(2 pi i r x)`` for ``y > 0``."""
    y = _fraction(y)
    if y <= 0:
        raise PreconditionError("q needs y > 0")
    r = _fraction(r)
    return WittElement({WittKey.exp2pi(-r * y): complex(np.exp(2j * math.pi * float(r) * x))})


@dataclass(frozen=True)
class LeafGridFunction:
    """Witt-valued function on a rectangular ``(x, y)`` grid, ``y > 0``.

    ``ys`` are exact rationals so that Frobenius relabelling is exact.
    ``values[i][j]`` sits at ``(xs[i], ys[j])``.
    """

    xs: np.ndarray
    ys: tuple
    values: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = tuple(_fraction(y) for y in self.ys)
        if xs.size < 2 or len(ys) < 2:
            raise PreconditionError("grid needs at least 2 nodes per axis")
        if np.any(np.diff(xs) <= 0) or any(b <= a for a, b in zip(ys, ys[1:])):
            raise PreconditionError("grid coordinates must be strictly increasing")
        if ys[0] <= 0:
            raise PreconditionError("grid needs y > 0")
        vals = tuple(tuple(row) for row in self.values)
        if len(vals) != xs.size or any(len(row) != len(ys) for row in vals):
            raise PreconditionError("values do not match the grid shape")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple:
        return self.xs.size, len(self.ys)

    @property
    def y_float(self) -> np.ndarray:
        return np.array([float(y) for y in self.ys])

    @classmethod
    def from_function(cls, fn, xs, ys) -> "LeafGridFunction":
        ys = tuple(_fraction(y) for y in ys)
        return cls(np.asarray(xs, dtype=float), ys, tuple(tuple(fn(float(x), y) for y in ys) for x in xs))

    def map(self, fn) -> "LeafGridFunction":
        return LeafGridFunction(self.xs, self.ys, tuple(tuple(fn(v) for v in row) for row in self.values))

    def chi_grid(self, lam) -> np.ndarray:
        return np.array([[chi(lam, v) for v in row] for row in self.values])

    def same_keys(self, other: "LeafGridFunction") -> bool:
        return (
            self.shape == other.shape
            and self.ys == other.ys
            and np.array_equal(self.xs, other.xs)
            and all(a.same_keys(b) for ra, rb in zip(self.values, other.values) for a, b in zip(ra, rb))
        )

    def max_coefficient_gap(self, other: "LeafGridFunction") -> float:
        if not self.same_keys(other):
            return math.inf
        gap = 0.0
        for ra, rb in zip(self.values, other.values):
            for a, b in zip(ra, rb):
                for k in a.terms:
                    gap = max(gap, abs(a.terms[k] - b.terms[k]))
        return gap


def q_grid(nx: int, ny: int, r=1, x_range=(0.0, 1.0), y_range=(Fraction(1, 4), Fraction(1, 2)),
           conjugate: bool = False) -> LeafGridFunction:
    """``q**r`` sampled on an ``nx x ny`` grid with exact rational ``y`` nodes.

    ``conjugate`` flips the sign of the phase (an anti-holomorphic control).
    """
    xs = np.linspace(*x_range, nx)
    y0, y1 = (_fraction(v) for v in y_range)
    ys = tuple(y0 + (y1 - y0) * Fraction(j, ny - 1) for j in range(ny))
    def fn(x, y):
        w = q_function(x, y, r)
        return WittElement({k: c.conjugate() if conjugate else c for k, c in w.terms.items()})

    return LeafGridFunction.from_function(fn, xs, ys)


def frobenius_lift(mu, F: LeafGridFunction) -> LeafGridFunction:
    """Arithmetic Frobenius ``Fr_mu = theta_mu o R(1/mu)``.

    ``(Fr_mu F)(x, y) = theta_mu(F(x, y/mu))``.  The result lives on the grid
    ``(xs, mu * ys)``: node ``(x, mu y)`` receives ``theta_mu(F(x, y))``, so no
    resampling is ever needed.
    """
    mu = _positive(mu, "mu")
    if mu == 1:
        return F
    return LeafGridFunction(F.xs, tuple(mu * y for y in F.ys), tuple(tuple(theta(mu, v) for v in row) for row in F.values))


def holomorphy_residual(F: LeafGridFunction, lam) -> float:
    """``sup |(lambda X + i Y) chi_lambda(F)|`` over interior nodes.

    ``X = y d/dx`` and ``Y = y d/dy`` by second-order central differences.
    """
    nx, ny = F.shape
    if nx < 5 or ny < 5:
        raise PreconditionError("holomorphy_residual needs a grid of at least 5 x 5")
    lamf = float(_positive(lam))
    g = F.chi_grid(lam)
    y = F.y_float
    dgx, dgy = np.gradient(g, F.xs, y, edge_order=2)
    res = y[None, :] * (lamf * dgx + 1j * dgy)
    return float(np.max(np.abs(res[1:-1, 1:-1])))
