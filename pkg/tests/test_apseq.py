from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropos.apseq import (
    APSequence,
    empirical_distribution,
    epsilon_period_check,
    gap_plateau_check,
    u_numerators,
    u_value,
    u_values,
)
from tropos.errors import PreconditionError
from tropos.selftest import run_checks


def digits(n, p):
    out = []
    while n:
        n, d = divmod(n, p)
        out.append(d)
    return out


def reverse_oracle(x, p, k=None):
    """Radical inverse by explicit digit lists; negatives via x + p**k."""
    if x >= 0:
        return sum(Fraction(d, p ** (j + 1)) for j, d in enumerate(digits(x, p)))
    y = x + p**k
    ds = digits(y, p) + [0] * (k - len(digits(y, p)))
    return sum(Fraction(d, p ** (j + 1)) for j, d in enumerate(ds)) + Fraction(1, p**k)


def test_selfchecks():
    assert run_checks("apseq", out=lambda _: None)


def test_first_values():
    seq = APSequence(2)
    assert [seq(k) for k in range(1, 7)] == [Fraction(1, 2), Fraction(1, 4), Fraction(3, 4),
                                             Fraction(1, 8), Fraction(5, 8), Fraction(3, 8)]
    assert seq(-1) == 1  # ...111 in 2-adic digits
    assert seq(-2) == Fraction(1, 2)


def test_not_prime():
    with pytest.raises(PreconditionError):
        APSequence(6)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(-10**6, 10**6))
def test_matches_digit_oracle(p, x):
    if x >= 0:
        assert u_value(APSequence(p), x) == reverse_oracle(x, p)
    else:
        k = 0
        while x + p**k <= 0:
            k += 1
        assert u_value(APSequence(p), x) == reverse_oracle(x, p, k + 3)


@given(st.sampled_from([2, 3, 5]), st.integers(-10**5, -1), st.integers(0, 6))
def test_negative_branch_independent_of_k(p, x, extra):
    seq = APSequence(p)
    k = 0
    while x + p**k <= 0:
        k += 1
    assert u_value(seq, x, k) == u_value(seq, x, k + extra)


@given(st.lists(st.integers(-70000, 70000), min_size=1, max_size=50), st.sampled_from([2, 3]))
def test_kernel_values_exact(ks, p):
    seq = APSequence(p)
    num, den = u_numerators(seq, ks)
    for k, n in zip(ks, num.tolist()):
        assert Fraction(int(n), int(den)) == u_value(seq, k)
    assert np.array_equal(u_values(seq, ks), np.array([float(u_value(seq, k)) for k in ks]))


def test_mixed_radix_chain():
    seq = APSequence.from_chain([2, 6, 12])  # radices 2, 3, 2, 2, ...
    assert seq.place(3) == 12 and seq.place(4) == 24
    assert seq(1) == Fraction(1, 2)
    assert seq(2) == Fraction(1, 6)  # 2 = 0 + 1*2: second digit over 2*3
    assert seq(-1) == u_value(seq, -1, k=5)
    with pytest.raises(PreconditionError):
        APSequence.from_chain([2, 5])


def test_period_check_and_injection():
    seq = APSequence(2)
    assert epsilon_period_check(seq, 6, range(-300, 300), range(-4, 5))
    assert not epsilon_period_check(seq, 6, range(-20, 20), [1], U=lambda x: Fraction(abs(x) % 3, 3))


@given(st.integers(0, 8), st.integers(-200, 200), st.integers(-5, 5))
def test_period_bound_for_mixed_chain(m, x, n):
    seq = APSequence.from_chain([3, 6, 18])
    P = seq.place(m)
    assert abs(seq(x + n * P) - seq(x)) <= Fraction(1, P)


def test_equidistribution_small():
    vals = u_values(APSequence(3), np.arange(-3**8, 3**8 + 1))
    dist = empirical_distribution(vals)
    assert dist.sup_distance(lambda s: s) < 1e-3


def test_empirical_distribution():
    with pytest.raises(PreconditionError):
        empirical_distribution([0.1, 0.2])
    d = empirical_distribution(np.repeat([0.25, 0.75], 600))
    assert d.cdf(0.25) == 0.5 and d.cdf(0.25, strict=True) == 0


def test_gap_plateau():
    # jumping past (0.8, 1.1) at u = 0.4: the plateau is the share of U below 0.4
    h = lambda u: np.where(u < 0.4, 2 * u, 2 * u + 0.3)  # noqa: E731
    val = gap_plateau_check(h, (0.81, 1.09), 4096)
    assert val.denominator <= 4096 and abs(float(val) - 0.4) < 1 / 64
    with pytest.raises(PreconditionError):
        gap_plateau_check(lambda u: u, (0.3, 0.4), 1024)
