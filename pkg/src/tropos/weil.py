"""Explicit-formula engine on the multiplicative half-line.

Test functions are stored on the log-lattice ``t_k = k h`` (``t = log u``),
where multiplicative convolution ``(f * g)(u) = int f(v) g(u/v) d*v`` becomes
an additive discrete convolution and the involution
``g~(u) = u**-1 g(1/u)`` becomes ``G~(t) = exp(-t) G(-t)``, both exact on the
lattice.  Measures: ``d*u = du/u = dt``.

Two routes to the same number:

* arithmetic side (:func:`weil_distribution`)
  ``N(h) = sum Lambda(n) h(n) + int_1^inf (u^2 h(u) - h(1))/(u^2 - 1) d*u + c h(1)``;
* zero side (:func:`counting_pair`), for supports inside ``(1, inf)``,
  ``int f du + int f d*u - sum_rho int u^(rho - 1) f(u) du``.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np
import sympy
from scipy.interpolate import CubicSpline

from tropos.errors import PreconditionError, ResolutionError

__all__ = [
    "H_GRID",
    "TestFunction",
    "WeilConstants",
    "ZeroTable",
    "ZeroTableError",
    "counting_pair",
    "counting_smooth_part",
    "explicit_formula_check",
    "find_zero_table",
    "gaussian_log_bump",
    "involution",
    "load_zeros",
    "log_bump",
    "mangoldt",
    "mellin",
    "moments",
    "mult_convolve",
    "omega_at_one",
    "omega_terms",
    "project_admissible",
    "quadratic_form",
    "summation_E",
    "weil_distribution",
    "zero_terms",
]

H_GRID = 2.0**-10
EULER_GAMMA = 0.57721566490153286060651209008240243


def _zeta_prime_minus_one() -> float:
    text = resources.files("tropos").joinpath("data/constants.json").read_text()
    return float(json.loads(text)["zeta_prime_minus_one"])


@dataclass(frozen=True)
class WeilConstants:
    """Constants of the arithmetic side and the archimedean quadrature rule."""

    c: float = 0.5 * (math.log(math.pi) + EULER_GAMMA)
    gl_order: int = 8
    zeta_prime_minus_one: float = field(default_factory=_zeta_prime_minus_one)


CONSTANTS = WeilConstants()


# ---------------------------------------------------------------- test functions


def _smooth_bump(s):
    """``exp(1 - 1/(1 - s^2))`` on ``|s| < 1``, zero outside (peak value 1)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Compactly supported function of ``u > 0`` sampled on ``t = k h``.

    ``values[j]`` is the value at ``u = exp((k0 + j) h)``.  ``evaluator``
    (vectorized, in ``u``) is kept for analytically defined functions; derived
    functions fall back to a clamped cubic spline in ``t``.
    """

    __test__ = False  # not a pytest class

    k0: int
    values: np.ndarray
    support: tuple
    h: float = H_GRID
    evaluator: Callable | None = None
    _spline: object = field(default=None, init=False, repr=False)

    def __post_init__(self):
        a, b = (float(x) for x in self.support)
        if not (0 < a < b) or not math.isfinite(b):
            raise PreconditionError(f"support must be a bounded interval in (0, inf), got ({a}, {b})")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 4:
            raise PreconditionError("need at least 4 grid values")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("grid values must be finite")
        object.__setattr__(self, "support", (a, b))
        object.__setattr__(self, "values", vals)
        if self.evaluator is None:
            spline = CubicSpline(self.t, vals, bc_type="clamped")
            object.__setattr__(self, "_spline", spline)

    # grid
    @property
    def t(self) -> np.ndarray:
        return (self.k0 + np.arange(self.values.size)) * self.h

    @property
    def k1(self) -> int:
        return self.k0 + self.values.size - 1

    @classmethod
    def from_callable(cls, fn: Callable, support, h: float = H_GRID) -> "TestFunction":
        """Sample ``fn`` (vectorized in ``u``) on the lattice covering ``support``."""
        a, b = (float(x) for x in support)
        if not (0 < a < b) or not math.isfinite(b):
            raise PreconditionError(f"support must be a bounded interval in (0, inf), got ({a}, {b})")
        k0 = math.floor(math.log(a) / h) - 1
        k1 = math.ceil(math.log(b) / h) + 1
        t = np.arange(k0, k1 + 1) * h

        def ev(u, fn=fn, a=a, b=b):
            u = np.asarray(u, dtype=float)
            inside = (u >= a) & (u <= b)
            out = np.zeros(u.shape)
            if np.any(inside):
                out[inside] = np.asarray(fn(u[inside]), dtype=float)
            return out

        return cls(k0, ev(np.exp(t)), (a, b), h, ev)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.evaluator is not None:
            return self.evaluator(u)
        with np.errstate(divide="ignore"):
            t = np.log(u)
        inside = (t >= self.t[0]) & (t <= self.t[-1])
        out = np.zeros(u.shape)
        out[inside] = self._spline(t[inside])
        return out

    def of_log(self, t):
        """``F(t) = f(exp(t))``."""
        return self(np.exp(np.asarray(t, dtype=float)))

    def resample(self, h: float) -> "TestFunction":
        """Same function on a lattice of spacing ``h``."""
        if h == self.h:
            return self
        fn = self.evaluator or self
        return TestFunction.from_callable(fn, self.support, h)

    # linear structure
    def _combine(self, other: "TestFunction", alpha: float, beta: float) -> "TestFunction":
        h = min(self.h, other.h)
        f, g = self.resample(h), other.resample(h)
        k0 = min(f.k0, g.k0)
        k1 = max(f.k1, g.k1)
        vals = np.zeros(k1 - k0 + 1)
        vals[f.k0 - k0 : f.k1 - k0 + 1] += alpha * f.values
        vals[g.k0 - k0 : g.k1 - k0 + 1] += beta * g.values
        support = (min(f.support[0], g.support[0]), max(f.support[1], g.support[1]))
        ev = None
        if f.evaluator is not None and g.evaluator is not None:
            ef, eg = f.evaluator, g.evaluator
            ev = lambda u: alpha * ef(u) + beta * eg(u)  # noqa: E731
        return TestFunction(k0, vals, support, h, ev)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, scalar: float):
        scalar = float(scalar)
        ev = None if self.evaluator is None else (lambda u, e=self.evaluator: scalar * e(u))
        return TestFunction(self.k0, scalar * self.values, self.support, self.h, ev)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def sup_distance(self, other: "TestFunction") -> float:
        """Sup-norm distance over the union of both lattices."""
        t = np.union1d(self.t, other.t)
        return float(np.max(np.abs(self.of_log(t) - other.of_log(t))))

    def grid_error(self) -> float:
        """Largest gap between the evaluator (or spline) and stored node values."""
        return float(np.max(np.abs(self.of_log(self.t) - self.values)))


def log_bump(a: float, b: float, h: float = H_GRID) -> TestFunction:
    """Smooth bump in ``t = log u`` supported on ``[a, b]``, peak value 1."""
    la, lb = math.log(a), math.log(b)
    mid, half = 0.5 * (la + lb), 0.5 * (lb - la)
    return TestFunction.from_callable(lambda u: _smooth_bump((np.log(u) - mid) / half), (a, b), h)


def gaussian_log_bump(
    center: float,
    width: float,
    support: tuple | None = None,
    h: float = H_GRID,
) -> TestFunction:
    """``exp(-(log(u/center))^2 / (2 width^2))`` tapered to a compact support.

    The default support is ``center * exp(+-6 width)``; the Gaussian is
    multiplied by a smooth bump on the support so that every derivative
    vanishes at its ends.
    """
    if width <= 0:
        raise PreconditionError("width must be positive")
    if support is None:
        support = (center * math.exp(-6 * width), center * math.exp(6 * width))
    a, b = support
    if not a < center < b:
        raise PreconditionError("center must lie inside the support")
    la, lb = math.log(a), math.log(b)
    mid, half = 0.5 * (la + lb), 0.5 * (lb - la)
    lc = math.log(center)

    def fn(u):
        t = np.log(u)
        return np.exp(-0.5 * ((t - lc) / width) ** 2) * _smooth_bump((t - mid) / half)

    return TestFunction.from_callable(fn, (a, b), h)


def involution(g: TestFunction) -> TestFunction:
    """``g~(u) = u**-1 g(1/u)``; on the lattice ``G~(t) = exp(-t) G(-t)``."""
    k0 = -g.k1
    t = (k0 + np.arange(g.values.size)) * g.h
    vals = np.exp(-t) * g.values[::-1]
    ev = None
    if g.evaluator is not None:
        e = g.evaluator
        ev = lambda u: e(1.0 / np.asarray(u, dtype=float)) / np.asarray(u, dtype=float)  # noqa: E731
    a, b = g.support
    return TestFunction(k0, vals, (1.0 / b, 1.0 / a), g.h, ev)


def mult_convolve(f: TestFunction, g: TestFunction) -> TestFunction:
    """``(f * g)(u) = int f(v) g(u/v) d*v`` as ``h * (F conv G)`` on the lattice.

    Lattices of different spacing are both resampled to the finer one.
    """
    h = min(f.h, g.h)
    f, g = f.resample(h), g.resample(h)
    vals = h * np.convolve(f.values, g.values)
    support = (f.support[0] * g.support[0], f.support[1] * g.support[1])
    return TestFunction(f.k0 + g.k0, vals, support, h)


# ---------------------------------------------------------------- arithmetic side


def mangoldt(n: int) -> float:
    """``log p`` if ``n`` is a power of the prime ``p``, else 0."""
    n = int(n)
    if n < 1:
        raise PreconditionError("mangoldt needs n >= 1")
    if n == 1:
        return 0.0
    fac = sympy.factorint(n)
    return math.log(next(iter(fac))) if len(fac) == 1 else 0.0


def summation_E(f: TestFunction | Callable, v: float, support: tuple | None = None) -> float:
    """``sum_{n >= 1} f(n v)``; only ``n`` in ``[a/v, b/v]`` contribute."""
    if v <= 0:
        raise PreconditionError("v must be positive")
    a, b = support if support is not None else f.support
    n_lo = max(1, math.ceil(a / v))
    n_hi = math.floor(b / v)
    if n_hi < n_lo:
        return 0.0
    ns = np.arange(n_lo, n_hi + 1, dtype=float)
    return float(np.sum(np.asarray(f(ns * v), dtype=float)))


def _gl_panels(lo: float, hi: float, edges: np.ndarray, order: int):
    """Gauss-Legendre nodes and weights on ``[lo, hi]`` split at ``edges``."""
    cuts = np.concatenate([[lo], edges[(edges > lo) & (edges < hi)], [hi]])
    x, w = np.polynomial.legendre.leggauss(order)
    left, right = cuts[:-1, None], cuts[1:, None]
    nodes = 0.5 * (right - left) * x + 0.5 * (right + left)
    weights = 0.5 * (right - left) * w
    return nodes.ravel(), weights.ravel()


def _archimedean(hf: TestFunction, h1: float, const: WeilConstants) -> float:
    """``int_1^inf (u^2 h(u) - h(1)) / (u^2 - 1) d*u`` (principal value)."""
    b = hf.support[1]
    if b <= 1.0:
        return 0.0  # then h(1) = 0 and the integrand vanishes on (1, inf)
    tb = math.log(b)
    t, w = _gl_panels(0.0, tb, hf.t, const.gl_order)
    H = hf.of_log(t)
    integrand = (np.exp(2 * t) * H - h1) / np.expm1(2 * t)
    tiny = t < 1e-7
    if np.any(tiny):
        # removable singularity at u = 1: limit h(1) + h'(1)/2
        d = 1e-5
        dh = float(hf(1 + d) - hf(1 - d)) / (2 * d)
        integrand[tiny] = h1 + 0.5 * dh
    # past the support the integrand is -h(1)/(u(u^2-1)); its d*u-integral is closed-form
    tail = 0.5 * h1 * math.log1p(-1.0 / (b * b))
    return float(np.dot(w, integrand)) + tail


def weil_distribution(hf: TestFunction, const: WeilConstants = CONSTANTS) -> float:
    """Arithmetic side ``N(h)``: primes, archimedean integral and ``c h(1)``."""
    a, b = hf.support
    if not math.isfinite(b):
        raise PreconditionError("weil_distribution needs bounded support")
    h1 = float(hf(1.0))
    ns = [n for n in range(max(2, math.ceil(a)), math.floor(b) + 1)]
    lam = np.array([mangoldt(n) for n in ns])
    primes = float(np.dot(lam, hf(np.array(ns, dtype=float)))) if ns else 0.0
    return primes + _archimedean(hf, h1, const) + const.c * h1


def quadratic_form(f: TestFunction, g: TestFunction, const: WeilConstants = CONSTANTS) -> float:
    """``s(f, g) = N(f * g~)``."""
    return weil_distribution(mult_convolve(f, involution(g)), const)


# ---------------------------------------------------------------- zero side


class ZeroTableError(PreconditionError):
    """Malformed zero file."""


@dataclass(frozen=True)
class ZeroTable:
    """Ascending positive ordinates of zeros ``1/2 + i gamma``, all simple."""

    ordinates: np.ndarray
    source: str = ""
    orders: np.ndarray | None = None

    def __post_init__(self):
        g = np.asarray(self.ordinates, dtype=float)
        if g.size == 0:
            raise ZeroTableError("zero table is empty")
        if np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise ZeroTableError("ordinates must be positive and strictly ascending")
        object.__setattr__(self, "ordinates", g)
        orders = np.ones(g.size, dtype=int) if self.orders is None else np.asarray(self.orders, dtype=int)
        object.__setattr__(self, "orders", orders)

    @property
    def count(self) -> int:
        return int(self.ordinates.size)

    def __len__(self):
        return self.count

    def head(self, n: int) -> "ZeroTable":
        if not 1 <= n <= self.count:
            raise PreconditionError(f"table has {self.count} zeros, asked for {n}")
        return ZeroTable(self.ordinates[:n], self.source, self.orders[:n])


def load_zeros(path) -> ZeroTable:
    """Parse a one-ordinate-per-line file; blank lines and ``#`` comments skipped."""
    path = Path(path)
    if not path.is_file():
        raise ZeroTableError(f"no zero file at {path}")
    vals: list = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        try:
            x = float(s)
        except ValueError:
            raise ZeroTableError(f"{path}:{lineno}: not a number: {s!r}") from None
        if not math.isfinite(x) or x <= 0:
            raise ZeroTableError(f"{path}:{lineno}: ordinate must be positive and finite")
        if vals and x <= vals[-1]:
            raise ZeroTableError(f"{path}:{lineno}: ordinates not strictly ascending")
        vals.append(x)
    if not vals:
        raise ZeroTableError(f"{path}: empty zero file")
    return ZeroTable(np.array(vals), str(path))


def find_zero_table(name: str = "zeros_1000.txt") -> Path:
    """Locate ``name``: as given, then in ``$TROPOS_DATA_DIR``, then bundled data."""
    direct = Path(name)
    if direct.is_file():
        return direct
    env = os.environ.get("TROPOS_DATA_DIR")
    if env:
        cand = Path(env) / name
        if cand.is_file():
            return cand
    bundled = resources.files("tropos").joinpath("data", name)
    if bundled.is_file():
        return Path(str(bundled))
    raise ZeroTableError(f"zero table {name!r} not found (set TROPOS_DATA_DIR)")


def mellin(f: TestFunction, s) -> np.ndarray:
    """``int f(u) u^(s-1) du = int F(t) exp(s t) dt`` by the lattice trapezoid rule.

    The integrand is smooth and compactly supported, so the rule converges
    spectrally while ``|Im s| h < pi``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    return f.h * (np.exp(np.outer(s, f.t)) @ f.values)


def moments(f: TestFunction) -> tuple:
    """``(int f d*u, int f du)``."""
    return float(f.h * np.sum(f.values)), float(f.h * np.dot(np.exp(f.t), f.values))


def counting_smooth_part(f: TestFunction) -> float:
    """``int (u + 1) f(u) d*u``: the zero-free part of the counting pairing."""
    m0, m1 = moments(f)
    return m0 + m1


def _fine_enough(f: TestFunction, gmax: float) -> TestFunction:
    while gmax * f.h > math.pi / 2:
        if f.evaluator is None:
            raise ResolutionError(f"lattice spacing {f.h} cannot resolve ordinate {gmax}")
        f = f.resample(f.h / 2)
    return f


def zero_terms(f: TestFunction, Z: ZeroTable, threads: int = 1, chunk: int = 256) -> np.ndarray:
    """Per-zero contributions ``2 order Re int u^(-1/2) cos(gamma log u) f(u) du``."""
    f = _fine_enough(f, float(Z.ordinates[-1]))
    w = f.h * np.exp(0.5 * f.t) * f.values

    def block(g):
        return 2.0 * (np.cos(np.outer(g, f.t)) @ w)

    parts = [Z.ordinates[i : i + chunk] for i in range(0, Z.count, chunk)]
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(block, parts))
    else:
        out = [block(g) for g in parts]
    return np.concatenate(out) * Z.orders


def counting_pair(f: TestFunction, Z: ZeroTable, threads: int = 1) -> float:
    """Zero side ``int N(u) f(u) d*u`` truncated to the zeros in ``Z``."""
    if f.support[0] <= 1.0:
        raise PreconditionError("counting_pair needs support inside (1, inf); u = 1 carries a point mass")
    if Z.count == 0:
        raise PreconditionError("empty zero table")
    # np.sum reduces pairwise in a fixed order, independent of `threads`
    return counting_smooth_part(f) - float(np.sum(zero_terms(f, Z, threads)))


def explicit_formula_check(f: TestFunction, Z: ZeroTable, threads: int = 1) -> dict:
    """Both sides of the explicit formula and their gap."""
    prime_side = weil_distribution(f)
    zero_side = counting_pair(f, Z, threads)
    residual = abs(prime_side - zero_side)
    return {
        "prime_side": prime_side,
        "zero_side": zero_side,
        "residual": residual,
        "relative_residual": residual / abs(prime_side) if prime_side else math.inf,
        "zeros_used": Z.count,
    }


def project_admissible(f: TestFunction, b1: TestFunction, b2: TestFunction) -> TestFunction:
    """``f - alpha b1 - beta b2`` with ``int . d*u = int . du = 0``."""
    A = np.array([moments(b1), moments(b2)]).T
    coef = np.linalg.solve(A, np.array(moments(f)))
    return f - (coef[0] * b1 + coef[1] * b2)


# ---------------------------------------------------------------- omega(1)


def omega_terms(zeta_prime_minus_one: float | None = None) -> tuple:
    """The four summands ``1/2, gamma/2, log(4 pi)/2, -zeta'(-1)/zeta(-1)``."""
    zp = CONSTANTS.zeta_prime_minus_one if zeta_prime_minus_one is None else zeta_prime_minus_one
    return 0.5, 0.5 * EULER_GAMMA, 0.5 * math.log(4 * math.pi), -zp / (-1.0 / 12.0)


def omega_at_one(zeta_prime_minus_one: float | None = None) -> float:
    return math.fsum(omega_terms(zeta_prime_minus_one))
