"""Discrete lift of a continuous signed density.

A signed density ``f = f_+ - f_-`` on the line is lifted to one ``+`` point
and one ``-`` point per integer height ``k``, at the real positions
``h_+(U(k))`` and ``h_-(U(k))``, where ``h_pm`` are the quantile functions of
the mass-normalized parts and ``U`` is the digit-reversal sequence.
Horizontal averages of the point set reproduce ``f / w`` (``w`` the common
mass).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from tropos.apseq import APSequence, u_values
from tropos.errors import PreconditionError

__all__ = [
    "Density",
    "DensityDivisor",
    "DiscreteLift",
    "build_lift",
    "closed_form_pairing",
    "fig4_divisor",
    "pair_with_test",
    "quantile",
    "strip_count",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class Density:
    """Nonnegative density on ``[alpha, beta]``.

    Either ``poly`` (a :class:`numpy.polynomial.Polynomial`, giving an exact
    antiderivative) or a vectorized ``pdf`` callable is required.  The CDF of
    a callable density is assembled from 20-point Gauss-Legendre panels.
    """

    support: tuple
    pdf: Callable | None = None
    poly: Polynomial | None = None
    scale: float = 1.0
    panels: int = 256
    _table: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = (float(v) for v in self.support)
        if not a < b:
            raise PreconditionError(f"empty support ({a}, {b})")
        object.__setattr__(self, "support", (a, b))
        if self.pdf is None and self.poly is None:
            raise PreconditionError("need pdf or poly")
        if self.poly is None:
            edges = np.linspace(a, b, self.panels + 1)
            mass = np.array([self._panel(lo, hi) for lo, hi in zip(edges, edges[1:])])
            object.__setattr__(self, "_table", (edges, np.concatenate([[0.0], np.cumsum(mass)])))

    @classmethod
    def polynomial(cls, coeffs, support) -> "Density":
        """Density given by power-series coefficients on ``support``."""
        return cls(support, poly=Polynomial(coeffs))

    def _raw(self, x):
        x = np.asarray(x, dtype=float)
        y = self.poly(x) if self.poly is not None else np.asarray(self.pdf(x), dtype=float)
        return np.where((x >= self.support[0]) & (x <= self.support[1]), y, 0.0)

    def __call__(self, x):
        return self.scale * self._raw(x)

    def _panel(self, lo, hi):
        xs = 0.5 * (hi - lo) * _GL_X + 0.5 * (hi + lo)
        return 0.5 * (hi - lo) * float(np.dot(_GL_W, self._raw(xs)))

    def _raw_cdf(self, x):
        a, b = self.support
        x = np.clip(np.asarray(x, dtype=float), a, b)
        if self.poly is not None:
            P = self.poly.integ(lbnd=a)
            return P(x)
        edges, cum = self._table
        i = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(edges) - 2)
        lo = edges[i]
        half = 0.5 * (x - lo)
        xs = half[..., None] * _GL_X + (0.5 * (x + lo))[..., None]
        part = half * np.sum(_GL_W * self._raw(xs), axis=-1)
        return cum[i] + part

    def cdf(self, x):
        return self.scale * self._raw_cdf(x)

    @property
    def mass(self) -> float:
        return float(self.cdf(self.support[1]))

    def normalize_mass(self) -> "Density":
        """Copy rescaled to unit mass."""
        m = float(self._raw_cdf(self.support[1]))
        if not m > 0:
            raise PreconditionError("density has no mass")
        return Density(self.support, self.pdf, self.poly, 1.0 / m, self.panels)

    def check_nonnegative(self, n: int = 4097) -> bool:
        xs = np.linspace(*self.support, n)
        return bool(np.all(self._raw(xs) >= -1e-14))


def quantile(density: Density, u, tol: float = 1e-12):
    """Monotone bisection of the CDF: ``a`` with ``CDF(a) = u``.

    ``u`` may be an array; the density must already be normalized.
    """
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)) or np.any(np.isnan(u)):
        raise PreconditionError("u must lie in [0, 1]")
    if abs(density.mass - 1.0) > 1e-9:
        raise PreconditionError("normalize the density before taking quantiles")
    a, b = density.support
    lo = np.full(u.shape, a)
    hi = np.full(u.shape, b)
    n_iter = int(math.ceil(math.log2((b - a) / tol))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = density.cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DensityDivisor:
    """Signed density ``f_+ - f_-`` with both parts nonnegative."""

    plus: Density
    minus: Density

    def __post_init__(self):
        for part in (self.plus, self.minus):
            if not part.check_nonnegative():
                raise PreconditionError("densities must be nonnegative")
            if not part.mass > 0:
                raise PreconditionError("densities must have positive mass")

    @property
    def masses(self) -> tuple:
        return self.plus.mass, self.minus.mass

    def signed(self, x):
        return self.plus(x) - self.minus(x)


def fig4_divisor() -> DensityDivisor:
    """``f_+ = x(1-x)``, ``f_- = 2x(1-x)^2`` on ``[0, 1]`` (both of mass 1/6)."""
    return DensityDivisor(
        Density.polynomial([0, 1, -1], (0.0, 1.0)),
        Density.polynomial([0, 2, -4, 2], (0.0, 1.0)),
    )


@dataclass(frozen=True)
class DiscreteLift:
    """One ``+`` and one ``-`` point per height ``k``, ``|k| <= K``.

    ``mass`` is the common mass ``w`` of the two parts: pairings average the
    normalized density ``(f_+ - f_-) / w``, so multiply by ``mass`` to
    recover integrals against ``f``.
    """

    heights: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    mass: float

    @property
    def K(self) -> int:
        return int(self.heights[-1])

    def points(self) -> list:
        """``(position, height, sign)`` triples, height-major, ``+`` first."""
        out = []
        for k, a, b in zip(self.heights.tolist(), self.plus.tolist(), self.minus.tolist()):
            out.append((a, k, 1))
            out.append((b, k, -1))
        return out

    def window(self, T: int) -> slice:
        if T > self.K:
            raise PreconditionError(f"T={T} exceeds K={self.K}")
        return slice(self.K - T, self.K + T + 1)


def build_lift(d: DensityDivisor, K: int, seq: APSequence | None = None, mass_rtol: float = 1e-9) -> DiscreteLift:
    """Lift ``d`` to heights ``-K..K``; unequal masses are rejected."""
    if K < 1:
        raise PreconditionError("K must be >= 1")
    w_plus, w_minus = d.masses
    if abs(w_plus - w_minus) > mass_rtol * max(w_plus, w_minus):
        raise PreconditionError(f"unequal masses {w_plus} vs {w_minus}: degree-zero lift needs equal masses")
    seq = seq or APSequence(2)
    ks = np.arange(-K, K + 1)
    u = u_values(seq, ks)
    plus = quantile(d.plus.normalize_mass(), u)
    minus = quantile(d.minus.normalize_mass(), u)
    return DiscreteLift(ks, np.atleast_1d(plus), np.atleast_1d(minus), w_plus)


def pair_with_test(L: DiscreteLift, psi: Callable, T: int) -> float:
    """``(1/2T) sum_{|k|<=T} [psi(pos_+(k)) - psi(pos_-(k))]``."""
    if T < 1:
        raise PreconditionError("T must be >= 1")
    sl = L.window(T)
    vals = np.asarray(psi(L.plus[sl]), dtype=float) - np.asarray(psi(L.minus[sl]), dtype=float)
    return float(np.sum(vals)) / (2 * T)


def strip_count(L: DiscreteLift, lo: float, hi: float, T: int, sign: int = 1) -> float:
    """``#{|k| <= T : pos(k) in [lo, hi]} / 2T`` for the chosen sign."""
    sl = L.window(T)
    pos = (L.plus if sign > 0 else L.minus)[sl]
    return float(np.count_nonzero((pos >= lo) & (pos <= hi))) / (2 * T)


def closed_form_pairing(d: DensityDivisor, psi: Callable) -> float:
    """``(1/w) int psi(x) (f_+ - f_-)(x) dx`` by adaptive quadrature."""
    w = d.plus.mass
    lo = min(d.plus.support[0], d.minus.support[0])
    hi = max(d.plus.support[1], d.minus.support[1])
    val, _ = integrate.quad(lambda x: float(psi(x)) * float(d.signed(x)), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val / w
