from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropos.apseq import APSequence
from tropos.errors import PreconditionError
from tropos.lift import (
    Density,
    DensityDivisor,
    build_lift,
    closed_form_pairing,
    fig4_divisor,
    pair_with_test,
    quantile,
    strip_count,
)
from tropos.selftest import run_checks


def poly_moment(coeffs, k):
    """int_0^1 x^k * sum c_i x^i dx, exact."""
    return sum(Fraction(c) / (i + k + 1) for i, c in enumerate(coeffs))


# normalized fig4 pairings (1/w) int psi (f+ - f-), psi = x^k, w = 1/6
FIG4 = {k: 6 * (poly_moment([0, 1, -1], k) - poly_moment([0, 2, -4, 2], k)) for k in range(3)}


@pytest.fixture(scope="module")
def fig4_lift():
    return build_lift(fig4_divisor(), 10_000)


def test_selfchecks():
    assert run_checks("lift", out=lambda _: None)


def test_frozen_moments():
    assert FIG4 == {0: 0, 1: Fraction(1, 10), 2: Fraction(1, 10)}
    d = fig4_divisor()
    assert d.masses == pytest.approx((1 / 6, 1 / 6), abs=1e-15)
    for k, v in FIG4.items():
        assert closed_form_pairing(d, lambda x, k=k: x**k) == pytest.approx(float(v), abs=1e-12)


def test_quantiles():
    beta = Density.polynomial([0, 6, -6], (0, 1))
    # CDF 3x^2 - 2x^3 at 0.2 is 0.104
    assert quantile(beta, 0.104) == pytest.approx(0.2, abs=1e-11)
    callable_beta = Density((0, 1), pdf=lambda x: 6 * x * (1 - x))
    u = np.linspace(0, 1, 41)
    assert np.allclose(quantile(callable_beta, u), quantile(beta, u), atol=1e-10)
    with pytest.raises(PreconditionError):
        quantile(Density.polynomial([0, 1, -1], (0, 1)), 0.5)  # not normalized


@given(st.floats(0, 1))
def test_quantile_inverts_cdf(u):
    d = Density.polynomial([0, 2, -4, 2], (0, 1)).normalize_mass()
    assert float(d.cdf(quantile(d, u))) == pytest.approx(u, abs=1e-10)


def test_pairings(fig4_lift):
    L = fig4_lift
    for k, v in FIG4.items():
        assert pair_with_test(L, lambda x, k=k: x**k, 10_000) == pytest.approx(float(v), abs=1e-5)
    assert pair_with_test(L, lambda x: np.ones_like(x), 10_000) == 0


def test_strip_counts(fig4_lift):
    F = lambda x: 3 * x**2 - 2 * x**3  # noqa: E731  normalized CDF of f+
    G = lambda x: 6 * x**2 - 8 * x**3 + 3 * x**4  # noqa: E731  normalized CDF of f-
    for lo, hi in [(0.2, 0.6), (0.0, 0.5), (0.7, 1.0)]:
        assert strip_count(fig4_lift, lo, hi, 10_000) == pytest.approx(F(hi) - F(lo), abs=2e-3)
        assert strip_count(fig4_lift, lo, hi, 10_000, sign=-1) == pytest.approx(G(hi) - G(lo), abs=2e-3)


def test_row_shape(fig4_lift):
    pts = fig4_lift.points()
    assert len(pts) == 2 * 20_001
    assert pts[0][1] == -10_000 and pts[0][2] == 1 and pts[1][2] == -1


def test_unequal_masses_rejected():
    d = DensityDivisor(Density.polynomial([1], (0, 1)), Density.polynomial([0, 1], (0, 1)))
    with pytest.raises(PreconditionError):
        build_lift(d, 10)


def test_other_prime():
    L = build_lift(fig4_divisor(), 3**8, seq=APSequence(3))
    assert pair_with_test(L, lambda x: x, 3**8) == pytest.approx(0.1, abs=1e-3)
