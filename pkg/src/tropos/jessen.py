"""Jensen functions and zero densities of finite exponential sums.

``f(s) = sum c_k exp(-lambda_k s)``.  The Jensen function is the vertical
mean ``phi(sigma) = (1/2T) int_{-T}^{T} log|f(sigma + it)| dt``; the jump of
``phi'`` across a strip, divided by ``2 pi``, is the density of zeros per unit
height, which :func:`zero_count` measures independently by the argument
principle.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from tropos import kernels
from tropos.errors import OnCircleZeroError, PreconditionError, ResolutionError

__all__ = [
    "ExponentialSum",
    "jessen_function",
    "zero_count",
    "zero_count_box",
    "zero_density_check",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ExponentialSum:
    """Finite sum ``sum c_k exp(-lambda_k s)`` with distinct real frequencies."""

    frequencies: tuple
    coefficients: tuple

    def __post_init__(self):
        lam = tuple(float(x) for x in self.frequencies)
        coef = tuple(complex(c) for c in self.coefficients)
        if len(lam) != len(coef) or not lam:
            raise PreconditionError("need matching, nonempty frequency and coefficient lists")
        if len(set(lam)) != len(lam):
            raise PreconditionError("frequencies must be distinct")
        if all(c == 0 for c in coef):
            raise PreconditionError("at least one coefficient must be nonzero")
        object.__setattr__(self, "frequencies", lam)
        object.__setattr__(self, "coefficients", coef)

    @classmethod
    def dirichlet(cls, coeffs: dict) -> "ExponentialSum":
        """``sum a_n n**(-s)`` from ``{n: a_n}``."""
        return cls(tuple(math.log(n) for n in coeffs), tuple(coeffs.values()))

    @classmethod
    def parse(cls, text: str) -> "ExponentialSum":
        """Parse ``"1,-1@log2"``: comma-separated ``coef[@freq]`` terms.

        ``freq`` is a float or ``logN``; a missing frequency means 0.
        Coefficients accept Python complex syntax (``0.5+1j``).
        """
        terms: dict = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            coef_s, _, freq_s = item.partition("@")
            freq_s = freq_s.strip() or "0"
            m = re.fullmatch(r"log\(?([0-9.eE+-]+)\)?", freq_s)
            freq = math.log(float(m.group(1))) if m else float(freq_s)
            terms[freq] = terms.get(freq, 0) + complex(coef_s.strip().replace(" ", ""))
        return cls(tuple(terms), tuple(terms.values()))

    def __call__(self, s):
        return kernels.expsum_eval(self.frequencies, self.coefficients, np.asarray(s, dtype=complex))

    def __mul__(self, other: "ExponentialSum") -> "ExponentialSum":
        terms: dict = {}
        for l1, c1 in zip(self.frequencies, self.coefficients):
            for l2, c2 in zip(other.frequencies, other.coefficients):
                key = round(l1 + l2, 12)
                terms[key] = terms.get(key, 0) + c1 * c2
        terms = {k: v for k, v in terms.items() if v != 0}
        return ExponentialSum(tuple(terms), tuple(terms.values()))

    @property
    def max_frequency(self) -> float:
        return max(abs(x) for x in self.frequencies)

    def dominant_term(self, side: int = 1) -> tuple:
        """``(lambda, c)`` dominating as ``sigma -> +inf`` (side=1) or ``-inf``."""
        pairs = [(l, c) for l, c in zip(self.frequencies, self.coefficients) if c != 0]
        return min(pairs) if side > 0 else max(pairs)


def _line_nodes(T: float, f: ExponentialSum, per_radian: int, n_nodes: int | None) -> int:
    if n_nodes is not None:
        return int(n_nodes)
    # resolve the fastest oscillation with `per_radian` nodes per radian of phase
    return max(2048, int(math.ceil(2 * T * max(f.max_frequency, 1.0) * per_radian)))


def jessen_function(
    f: ExponentialSum,
    sigma: float,
    T: float = 1000.0,
    n_nodes: int | None = None,
    per_radian: int = 16,
) -> float:
    """``(1/2T) int_{-T}^{T} log|f(sigma + it)| dt`` (composite midpoint rule).

    Midpoint nodes avoid the real axis; a node landing on a zero triggers one
    retry on nodes shifted by a quarter step.
    """
    if T < 100:
        raise PreconditionError("T must be at least 100")
    n = _line_nodes(T, f, per_radian, n_nodes)
    dt = 2.0 * T / n
    for shift in (0.5, 0.25):
        t = -T + (np.arange(n) + shift) * dt
        vals = np.abs(f(sigma + 1j * t))
        if np.all(vals > 0) and np.all(np.isfinite(vals)):
            return float(np.mean(np.log(vals)))
    raise OnCircleZeroError(f"f vanishes on the line Re s = {sigma}")


def _edge_args(f, a: complex, b: complex, n0: int, max_step: float, max_points: int) -> float:
    """Total argument change of ``f`` along the segment ``a -> b``."""
    u = np.linspace(0.0, 1.0, n0 + 1)
    vals = f(a + (b - a) * u)
    for _ in range(200):
        if np.any(vals == 0) or not np.all(np.isfinite(vals)):
            raise ResolutionError(f"f vanishes on the contour segment {a} -> {b}")
        steps = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(steps) > max_step
        if not np.any(bad):
            return float(np.sum(steps))
        if u.size + int(bad.sum()) > max_points:
            break
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (u[idx] + u[idx + 1])
        if np.any(mids <= u[idx]):
            break
        u = np.insert(u, idx + 1, mids)
        vals = np.insert(vals, idx + 1, f(a + (b - a) * mids))
    raise ResolutionError(f"argument does not resolve along {a} -> {b}: zero on or near the contour")


def zero_count_box(
    f: ExponentialSum,
    sigma1: float,
    sigma2: float,
    t1: float,
    t2: float,
    max_step: float = math.pi / 8,
    max_points: int = 1 << 22,
) -> int:
    """Zeros (with multiplicity) inside ``[sigma1, sigma2] x [t1, t2]``."""
    if not (sigma1 < sigma2 and t1 < t2):
        raise PreconditionError("degenerate rectangle")
    per = max(f.max_frequency, 1.0)
    corners = [complex(sigma1, t1), complex(sigma2, t1), complex(sigma2, t2), complex(sigma1, t2)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        n0 = max(64, int(math.ceil(abs(b - a) * per * 4)))
        total += _edge_args(f, a, b, n0, max_step, max_points)
    count = total / TWO_PI
    k = round(count)
    if abs(count - k) > 0.1:
        raise ResolutionError(f"argument change {count} x 2pi is not near an integer")
    return int(k)


def zero_count(
    f: ExponentialSum,
    sigma1: float,
    sigma2: float,
    T: float,
    seed: int = 0,
    retries: int = 5,
) -> tuple:
    """Zeros in ``[sigma1, sigma2] x [-T, T]``, jittering ``T`` on failure.

    Returns ``(count, T_used)``; ``T_used`` differs from ``T`` by at most 0.1
    when a zero sat on a horizontal edge.
    """
    rng = np.random.default_rng(seed)
    T_used = float(T)
    last = None
    for _ in range(retries + 1):
        try:
            return zero_count_box(f, sigma1, sigma2, -T_used, T_used), T_used
        except ResolutionError as exc:
            last = exc
            T_used = float(T) + float(rng.uniform(-0.1, 0.1))
    raise ResolutionError(f"zero count failed after {retries} jitters: {last}")


def _phi_prime(f, sigma, T, h, n_nodes):
    return (jessen_function(f, sigma + h, T, n_nodes) - jessen_function(f, sigma - h, T, n_nodes)) / (2 * h)


def zero_density_check(
    f: ExponentialSum,
    sigma1: float,
    sigma2: float,
    T: float = 1000.0,
    h: float = 1e-3,
    seed: int = 0,
    n_nodes: int | None = None,
) -> dict:
    """Compare the zero frequency in a strip with the jump of ``phi'``."""
    if not sigma1 < sigma2:
        raise PreconditionError("need sigma1 < sigma2")
    count, T_used = zero_count(f, sigma1, sigma2, T, seed=seed)
    density = count / (2 * T_used)
    d1 = _phi_prime(f, sigma1, T_used, h, n_nodes)
    d2 = _phi_prime(f, sigma2, T_used, h, n_nodes)
    jump = (d2 - d1) / TWO_PI
    gap = abs(density - jump)
    return {
        "zeros": count,
        "T": T_used,
        "zero_density": density,
        "phi_prime": [d1, d2],
        "slope_jump_density": jump,
        "abs_gap": gap,
        "rel_gap": gap / max(abs(jump), abs(density)) if max(abs(jump), abs(density)) > 0 else 0.0,
    }
