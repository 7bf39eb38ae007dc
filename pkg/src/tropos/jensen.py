"""Archimedean tropicalization: circle means of ``log|f|`` and winding numbers.

``tau(f)(x)`` is the mean of ``log|f|`` over the circle of radius ``exp(-x)``.
Its slope at ``x`` is minus the winding number of ``f`` on that circle, so
breakpoints (and their multiplicities) are located with integer winding
numbers rather than by differentiating noisy quadrature values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from tropos.errors import DomainError, OnCircleZeroError, PreconditionError, ResolutionError
from tropos.pwa import PiecewiseAffine

__all__ = [
    "AnnulusFunction",
    "tropical_profile",
    "tropicalize_c",
    "winding_number",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AnnulusFunction:
    """Analytic function on ``r1 < |z| < r2`` given by a vectorized evaluator.

    The evaluator maps a complex ndarray to a complex ndarray and must be
    safe to call concurrently.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    r1: float = 0.0
    r2: float = math.inf
    known_zeros: tuple = ()

    def __post_init__(self):
        if not 0 <= self.r1 < self.r2:
            raise PreconditionError(f"bad annulus ({self.r1}, {self.r2})")
        for z, _ in self.known_zeros:
            if not self.r1 < abs(z) < self.r2:
                raise PreconditionError(f"known zero {z} outside the annulus")

    def __call__(self, z):
        return self.evaluator(np.asarray(z, dtype=complex))

    @property
    def x_interval(self) -> tuple:
        lo = -math.log(self.r2) if self.r2 < math.inf else -math.inf
        hi = -math.log(self.r1) if self.r1 > 0 else math.inf
        return lo, hi

    @classmethod
    def from_roots(cls, roots: Sequence, leading: complex = 1.0, r1: float = 0.0, r2: float = math.inf):
        """``leading * prod (z - root)``; repeated roots give multiplicities."""
        roots = np.asarray(roots, dtype=complex)

        def ev(z, roots=roots, c=complex(leading)):
            out = np.full(np.shape(z), c, dtype=complex)
            for a in roots:
                out = out * (z - a)
            return out

        counts: dict = {}
        for a in roots.tolist():
            counts[a] = counts.get(a, 0) + 1
        zeros = tuple((a, m) for a, m in counts.items() if r1 < abs(a) < r2)
        return cls(ev, r1, r2, zeros)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, r1: float = 0.0, r2: float = math.inf):
        """``sum coeffs[n] z**n`` (Horner)."""
        coeffs = np.asarray(coeffs, dtype=complex)

        def ev(z, coeffs=coeffs):
            out = np.zeros(np.shape(z), dtype=complex)
            for c in coeffs[::-1]:
                out = out * z + c
            return out

        return cls(ev, r1, r2)

    @classmethod
    def exponential_sum(cls, terms: Sequence, r1: float = 0.0, r2: float = math.inf):
        """``sum c * exp(a z)`` over ``terms = [(c, a), ...]``."""
        cs = np.array([t[0] for t in terms], dtype=complex)
        As = np.array([t[1] for t in terms], dtype=complex)

        def ev(z, cs=cs, As=As):
            out = np.zeros(np.shape(z), dtype=complex)
            for c, a in zip(cs, As):
                out = out + c * np.exp(a * z)
            return out

        return cls(ev, r1, r2)

    def compose_power(self, n: int) -> "AnnulusFunction":
        """``z -> f(z**n)`` on the annulus ``r1**(1/n) < |z| < r2**(1/n)``."""
        ev = self.evaluator
        r2 = self.r2 ** (1.0 / n) if self.r2 < math.inf else math.inf
        return AnnulusFunction(lambda z: ev(np.asarray(z) ** n), self.r1 ** (1.0 / n), r2)

    def __mul__(self, other: "AnnulusFunction") -> "AnnulusFunction":
        e1, e2 = self.evaluator, other.evaluator
        return AnnulusFunction(lambda z: e1(z) * e2(z), max(self.r1, other.r1), min(self.r2, other.r2),
                               self.known_zeros + other.known_zeros)


def _check_x(f: AnnulusFunction, x: float):
    lo, hi = f.x_interval
    if not lo < x < hi:
        raise DomainError(f"x={x} outside ({lo}, {hi})")


def _circle_logmean(f: AnnulusFunction, x: float, n: int, offset: float) -> float:
    theta = (np.arange(n) + offset) * (TWO_PI / n)
    vals = np.abs(f(np.exp(-x + 1j * theta)))
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise OnCircleZeroError(f"f vanishes on the circle |z| = exp({-x})")
    return float(np.mean(np.log(vals)))


def tropicalize_c(
    f: AnnulusFunction,
    x: float,
    n_nodes: int = 64,
    tol: float = 1e-10,
    max_nodes: int = 1 << 20,
) -> float:
    """Mean of ``log|f|`` on ``|z| = exp(-x)`` by the periodic trapezoid rule.

    Node counts double until two successive estimates agree to ``tol``.  A
    node landing on a zero triggers one retry on half-step offset nodes.
    """
    if n_nodes < 64:
        raise PreconditionError("n_nodes must be at least 64")
    _check_x(f, x)

    def estimate(n):
        try:
            return _circle_logmean(f, x, n, 0.0)
        except OnCircleZeroError:
            try:
                return _circle_logmean(f, x, n, 0.5)
            except OnCircleZeroError as exc:
                raise OnCircleZeroError(f"{exc} (x={x})") from None

    n = n_nodes
    prev = estimate(n)
    while n < max_nodes:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise ResolutionError(f"trapezoid did not settle to {tol} with {max_nodes} nodes at x={x}")


def _arg_steps(vals: np.ndarray) -> np.ndarray:
    return np.angle(np.roll(vals, -1) / vals)


def winding_number(
    f: AnnulusFunction,
    x: float,
    n_nodes: int = 256,
    max_step: float = math.pi / 4,
    max_points: int = 1 << 22,
) -> int:
    """Winding number of ``theta -> f(exp(-x + i theta))`` around 0.

    Starts from ``n_nodes`` equispaced angles and bisects every arc whose
    argument increment exceeds ``max_step`` until none does.  Near-circle
    zeros therefore cost only a logarithmic number of extra nodes.
    """
    _check_x(f, x)
    r = math.exp(-x)
    theta = np.arange(n_nodes) * (TWO_PI / n_nodes)
    vals = f(r * np.exp(1j * theta))
    for _ in range(200):
        if np.any(vals == 0) or not np.all(np.isfinite(vals)):
            raise OnCircleZeroError(f"f vanishes on the circle |z| = exp({-x}) (x={x})")
        steps = _arg_steps(vals)
        bad = np.abs(steps) > max_step
        if not np.any(bad):
            total = float(np.sum(steps)) / TWO_PI
            w = round(total)
            if abs(total - w) > 0.1:
                raise ResolutionError(f"argument sum {total} is not near an integer at x={x}")
            return int(w)
        if theta.size + int(bad.sum()) > max_points:
            break
        idx = np.nonzero(bad)[0]
        nxt = np.where(idx + 1 < theta.size, theta[(idx + 1) % theta.size], TWO_PI)
        mids = 0.5 * (theta[idx] + nxt)
        if np.any(mids <= theta[idx]):
            break  # arcs below float resolution: zero sits on the circle
        theta = np.insert(theta, idx + 1, mids)
        vals = np.insert(vals, idx + 1, f(r * np.exp(1j * mids)))
    raise OnCircleZeroError(f"argument does not resolve on |z| = exp({-x}) (x={x}); zero on or too near the circle")


def tropical_profile(
    f: AnnulusFunction,
    grid: Sequence[float],
    n_nodes: int = 256,
    width: float = 1e-6,
) -> PiecewiseAffine:
    """Piecewise-affine tropicalization from winding numbers on a grid.

    Every grid cell whose endpoint winding numbers differ is bisected until
    the slope changes are pinned to cells of length ``<= width``; each
    breakpoint sits at the centre of its final cell.  The additive constant
    is fixed by one quadrature value on the first usable grid point.
    """
    grid = [float(x) for x in grid]
    if len(grid) < 8:
        raise PreconditionError("grid needs at least 8 points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise PreconditionError("grid must be strictly increasing")
    for x in (grid[0], grid[-1]):
        _check_x(f, x)

    cache: dict = {}

    def wind(x):
        if x not in cache:
            cache[x] = winding_number(f, x, n_nodes)
        return cache[x]

    found: list = []

    def locate(xl, wl, xr, wr):
        # winding is non-increasing in x, so equal ends mean no zero between
        while True:
            if wl == wr:
                return
            if xr - xl <= width:
                found.append((0.5 * (xl + xr), wl - wr))
                return
            xm = 0.5 * (xl + xr)
            wm = wind(xm)
            locate(xl, wl, xm, wm)
            xl, wl = xm, wm

    ws = [wind(x) for x in grid]
    for (xl, xr), (wl, wr) in zip(zip(grid, grid[1:]), zip(ws, ws[1:])):
        if wr > wl:
            raise ResolutionError(f"winding increased between x={xl} and x={xr}")
        locate(xl, wl, xr, wr)

    found.sort()
    bps = [x for x, _ in found]
    slopes = [-ws[0]]
    for _, m in found:
        slopes.append(slopes[-1] + m)
    anchor = None
    for x in grid:
        try:
            anchor = (x, tropicalize_c(f, x))
            break
        except ResolutionError:
            continue
    if anchor is None:
        raise ResolutionError("no grid point admits a converged circle mean")
    return PiecewiseAffine(f.x_interval, tuple(bps), tuple(slopes), anchor)
