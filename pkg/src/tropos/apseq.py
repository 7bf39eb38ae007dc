"""The digit-reversal almost periodic sequence on Z and its distribution.

For ``x = sum a_j p**j >= 0`` the sequence is ``U(x) = sum a_j p**(-j-1)``
(the radical inverse).  Negative integers are reached through the limit
``U(x) = lim U(x + p**n)``: with ``y = x + p**k > 0`` written on ``k`` digits,
``U(x) = reverse_k(y) + p**(-k)``, independently of ``k``.

A mixed-radix variant replaces the constant base by a radix chain
``r_1, r_2, ...`` (place values ``1, r_1, r_1 r_2, ...``); the last radix is
repeated past the end of the chain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
import sympy

from tropos import kernels
from tropos.errors import PreconditionError, ResolutionError

__all__ = [
    "APSequence",
    "DistributionFunction",
    "empirical_distribution",
    "epsilon_period_check",
    "gap_plateau_check",
    "u_value",
    "u_values",
]


@dataclass(frozen=True)
class APSequence:
    """Digit-reversal sequence for a prime ``p`` or a radix chain."""

    p: int = 2
    radices: tuple | None = None

    def __post_init__(self):
        if self.radices is None:
            if not sympy.isprime(self.p):
                raise PreconditionError(f"p={self.p} is not prime")
        else:
            radices = tuple(int(r) for r in self.radices)
            if not radices or any(r < 2 for r in radices):
                raise PreconditionError("radices must be integers >= 2")
            object.__setattr__(self, "radices", radices)

    @classmethod
    def from_chain(cls, chain: Sequence[int]) -> "APSequence":
        """Build from a divisibility chain ``n_1 | n_2 | ...`` (``n_1 > 1``)."""
        chain = [1, *(int(n) for n in chain)]
        radices = []
        for lo, hi in zip(chain, chain[1:]):
            if hi % lo or hi == lo:
                raise PreconditionError(f"{lo} does not properly divide {hi}")
            radices.append(hi // lo)
        return cls(p=radices[0], radices=tuple(radices))

    @property
    def is_prime_power_chain(self) -> bool:
        return self.radices is None

    def radix(self, j: int) -> int:
        if self.radices is None:
            return self.p
        return self.radices[min(j, len(self.radices) - 1)]

    def place(self, k: int) -> int:
        """Place value of digit ``k`` (``p**k`` in the prime case)."""
        if self.radices is None:
            return self.p**k
        out = 1
        for j in range(k):
            out *= self.radix(j)
        return out

    def __call__(self, x: int) -> Fraction:
        return u_value(self, x)


def _reverse(seq: APSequence, y: int, ndigits: int | None = None) -> Fraction:
    # num/den after digit j equals sum_{i<=j} a_i / place(i+1)
    num, den, j = 0, 1, 0
    while (y > 0) if ndigits is None else (j < ndigits):
        r = seq.radix(j)
        y, a = divmod(y, r)
        num = num * r + a
        den *= r
        j += 1
    return Fraction(num, den)


def u_value(seq: APSequence, x: int, k: int | None = None) -> Fraction:
    """Exact ``U(x)``.

    For negative ``x`` the default is the smallest ``k`` with
    ``x + place(k) > 0``; any larger ``k`` may be forced to check
    independence of the choice.
    """
    x = int(x)
    if x >= 0:
        return _reverse(seq, x)
    if k is None:
        k = 0
        while x + seq.place(k) <= 0:
            k += 1
    elif x + seq.place(k) <= 0:
        raise PreconditionError(f"k={k} too small for x={x}")
    pk = seq.place(k)
    return _reverse(seq, x + pk, ndigits=k) + Fraction(1, pk)


def u_values(seq: APSequence, ks) -> np.ndarray:
    """Float ``U(k)`` for an integer array, via the compiled kernel when possible."""
    ks = np.asarray(ks, dtype=np.int64)
    if seq.is_prime_power_chain:
        try:
            return kernels.radical_inverse(seq.p, ks)
        except OverflowError:
            pass
    return np.array([float(u_value(seq, int(k))) for k in ks])


def u_numerators(seq: APSequence, ks, M: int | None = None):
    """Exact values as integer numerators over a common denominator.

    Returns ``(numerators, denominator)``.  Falls back to Python integers
    (object array) when the kernel range is exceeded or for mixed radices.
    """
    ks = np.asarray(ks, dtype=np.int64)
    if seq.is_prime_power_chain:
        try:
            return kernels.radical_inverse_num(seq.p, ks, M)
        except OverflowError:
            pass
    vals = [u_value(seq, int(k)) for k in ks]
    den = math.lcm(*(v.denominator for v in vals)) if vals else 1
    return np.array([v.numerator * (den // v.denominator) for v in vals], dtype=object), den


def epsilon_period_check(
    seq: APSequence,
    m: int,
    window: Iterable[int],
    n_range: Iterable[int],
    U: Callable[[int], Fraction] | None = None,
) -> bool:
    """Check ``|U(x + n p**m) - U(x)| <= p**(-m)`` exactly on a window.

    ``U`` overrides the sequence (used to inject violations).  Without an
    override the check runs on exact integer numerators.
    """
    if m < 0:
        raise PreconditionError("m must be >= 0")
    period = seq.place(m)
    xs = np.asarray(list(window), dtype=np.int64)
    ns = np.asarray(list(n_range), dtype=np.int64)
    if xs.size == 0 or ns.size == 0:
        return True
    if U is not None:
        bound = Fraction(1, period)
        return all(abs(U(int(x) + int(n) * period) - U(int(x))) <= bound for x in xs for n in ns)
    shifted = (xs[None, :] + ns[:, None] * period).ravel()
    allk = np.concatenate([xs, shifted])
    num, den = u_numerators(seq, allk)
    base = num[: xs.size]
    moved = num[xs.size :].reshape(ns.size, xs.size)
    # |a/den - b/den| <= 1/period  <=>  |a - b| * period <= den
    return bool(np.all(np.abs(moved - base[None, :]) * period <= den))


@dataclass(frozen=True)
class DistributionFunction:
    """Empirical distribution: mass of samples ``<= sigma``."""

    values: np.ndarray
    weights: np.ndarray

    def __call__(self, sigma):
        return self.cdf(sigma)

    def cdf(self, sigma, strict: bool = False):
        """``mu(sigma+0)`` by default; ``strict`` gives ``mu(sigma-0)``."""
        side = "left" if strict else "right"
        idx = np.searchsorted(self.values, sigma, side=side)
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        return cum[idx]

    def sup_distance(self, cdf: Callable) -> float:
        """Kolmogorov distance to a continuous distribution function."""
        cum = np.cumsum(self.weights)
        target = np.asarray(cdf(self.values), dtype=float)
        before = np.concatenate([[0.0], cum[:-1]])
        return float(max(np.max(np.abs(cum - target)), np.max(np.abs(before - target))))


def empirical_distribution(values, min_samples: int = 1000) -> DistributionFunction:
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise PreconditionError("empty sample")
    if vals.size < min_samples:
        raise PreconditionError(f"need at least {min_samples} samples, got {vals.size}")
    uniq, counts = np.unique(vals, return_counts=True)
    return DistributionFunction(uniq, counts / vals.size)


def gap_plateau_check(
    h: Callable,
    gap: tuple,
    T: int,
    seq: APSequence | None = None,
    n_probe: int = 100_001,
) -> Fraction:
    """Plateau of the distribution of ``h(U(k))``, ``|k| <= T``, inside a gap.

    The gap must avoid the sampled range of ``h`` on ``[0, 1]``.  The plateau
    is snapped to the nearest rational with denominator ``p**K`` (largest
    ``K`` with ``p**K <= T``) and must lie within ``1/sqrt(T)`` of it.
    """
    seq = seq or APSequence(2)
    lo, hi = gap
    probe = np.asarray(h(np.linspace(0.0, 1.0, n_probe)), dtype=float)
    if np.any((probe > lo) & (probe < hi)):
        raise PreconditionError(f"gap ({lo}, {hi}) meets the range of h")
    ks = np.arange(-T, T + 1)
    dist = empirical_distribution(np.asarray(h(u_values(seq, ks)), dtype=float))
    plateau = float(dist.cdf(0.5 * (lo + hi)))
    K = 0
    while seq.place(K + 1) <= T:
        K += 1
    den = seq.place(K)
    snapped = Fraction(round(plateau * den), den)
    if abs(plateau - float(snapped)) > 1.0 / math.sqrt(T):
        raise ResolutionError(f"plateau {plateau} is not within 1/sqrt(T) of a rational over {den}")
    return snapped
