import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from tropos import weil as W
from tropos.errors import PreconditionError
from tropos.selftest import run_checks

# mpmath, 40 digits: 1/2 + gamma/2 + log(4 pi)/2 - zeta'(-1)/zeta(-1)
OMEGA_ORACLE = 0.0690662315300006762251659192625
C_ORACLE = 0.8609727753754665173749697207177


def quad_u(fn, a, b, points=None):
    val, _ = integrate.quad(fn, a, b, epsabs=1e-14, epsrel=1e-13, limit=400, points=points)
    return val


def bump_2129():
    return W.gaussian_log_bump(math.sqrt(2.1 * 2.9), math.log(2.9 / 2.1) / 8, (2.1, 2.9))


def test_selfchecks():
    assert run_checks("weil", out=lambda _: None)


def test_constants():
    assert W.CONSTANTS.c == pytest.approx(C_ORACLE, abs=1e-12)
    assert W.omega_at_one() == pytest.approx(OMEGA_ORACLE, abs=1e-10)


def test_omega_sensitivity():
    z = W.CONSTANTS.zeta_prime_minus_one
    assert W.omega_at_one(z + 1e-8) - W.omega_at_one(z) == pytest.approx(1.2e-7, rel=1e-5)


def test_omega_against_zero_sum(zeros):
    # omega(1) = sum_rho 1/(rho + 1); past the last ordinate G the zero density
    # log(g / 2 pi) / 2 pi gives the tail (3 / 2 pi)(log(G / 2 pi) + 1) / G
    g = zeros.ordinates
    partial = float(np.sum(3.0 / (2.25 + g**2)))
    G = g[-1]
    tail = 3 / (2 * math.pi) * (math.log(G / (2 * math.pi)) + 1) / G
    assert partial + tail == pytest.approx(W.omega_at_one(), abs=2e-5)


def test_mangoldt_and_psi():
    assert W.mangoldt(8) == math.log(2) and W.mangoldt(6) == 0 and W.mangoldt(1) == 0
    with pytest.raises(PreconditionError):
        W.mangoldt(0)
    # psi(100) by enumerating prime powers
    psi = sum(math.log(p) * int(math.log(100, p) + 1e-12) for p in sympy.primerange(2, 101))
    assert math.fsum(W.mangoldt(n) for n in range(1, 101)) == pytest.approx(psi, abs=1e-12)


def test_summation_E_loop_oracle():
    f = W.log_bump(1.3, 7.7)
    for v in (0.1, 0.37, 2.0):
        direct = sum(float(f(n * v)) for n in range(1, 200))
        assert W.summation_E(f, v) == pytest.approx(direct, rel=1e-14)
    assert W.summation_E(f, 8.0) == 0


def test_archimedean_only_when_no_prime_powers():
    f = bump_2129()
    oracle = quad_u(lambda u: float(f(u)) * u / (u * u - 1), 2.1, 2.9)
    assert W.weil_distribution(f) == pytest.approx(oracle, abs=1e-9)


def test_point_mass_at_one():
    # h(1) = 1, support (0.5, 1.5): PV integral on (1, 1.5), closed-form tail, plus c
    f = W.log_bump(0.5, 2.0)
    h1 = float(f(1.0))
    assert h1 == pytest.approx(1.0)

    def integrand(u):
        return (u * u * float(f(u)) - h1) / ((u * u - 1) * u)

    body = quad_u(integrand, 1.0, 2.0)
    tail = 0.5 * h1 * math.log(1 - 1 / 4.0)
    assert W.weil_distribution(f) == pytest.approx(body + tail + C_ORACLE * h1 + math.log(2) * float(f(2.0)), abs=1e-9)


def test_prime_side_picks_up_prime_powers():
    f = W.log_bump(3.5, 4.5)
    arch = quad_u(lambda u: float(f(u)) * u / (u * u - 1), 3.5, 4.5)
    assert W.weil_distribution(f) == pytest.approx(math.log(2) * float(f(4.0)) + arch, abs=1e-9)


def test_unbounded_support_rejected():
    with pytest.raises(PreconditionError):
        W.TestFunction.from_callable(lambda u: u, (1.0, math.inf))


@given(st.integers(0, 2**31 - 1))
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0.3, 2.0, 2)
    f = W.log_bump(a, a * rng.uniform(1.5, 4))
    g = W.gaussian_log_bump(b * 1.5, 0.2, (b, b * 2.5))
    al, be = rng.normal(size=2)
    lhs = W.weil_distribution(al * f + be * g)
    rhs = al * W.weil_distribution(f) + be * W.weil_distribution(g)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_involution():
    g = W.gaussian_log_bump(1.7, 0.15)
    gg = W.involution(W.involution(g))
    assert gg.sup_distance(g) <= 1e-10
    assert W.involution(g).support == pytest.approx((1 / g.support[1], 1 / g.support[0]))
    # lattice values and evaluator agree
    assert W.involution(g).grid_error() < 1e-12
    u = np.array([0.6, 0.7])
    assert np.allclose(W.involution(g)(u), g(1 / u) / u, atol=1e-15)


def test_convolution_double_quadrature():
    f = W.log_bump(1.0, 2.0)
    g = W.gaussian_log_bump(1.5, 0.1, (1.2, 1.9))
    fg, gf = W.mult_convolve(f, g), W.mult_convolve(g, f)
    assert fg.support == pytest.approx((1.2, 3.8))
    assert np.max(np.abs(fg.values - gf.values)) < 1e-10
    for u in (1.5, 2.0, 2.7, 3.3):
        direct = quad_u(lambda v: float(f(v)) * float(g(u / v)) / v, 1.0, 2.0)
        assert float(fg(u)) == pytest.approx(direct, abs=1e-10)


def test_convolution_approximate_identity():
    f = W.gaussian_log_bump(2.0, 0.2)
    width = 0.01
    delta = W.gaussian_log_bump(1.0, width / 6)  # support exp(+-width)
    delta = delta * (1.0 / W.moments(delta)[0])
    conv = W.mult_convolve(f, delta)
    t = f.t
    assert np.max(np.abs(conv.of_log(t) - f.of_log(t))) <= 2 * width


def test_mixed_spacing_resamples():
    f = W.log_bump(1.0, 2.0, h=2**-9)
    g = W.log_bump(1.0, 2.0)
    assert W.mult_convolve(f, g).h == 2**-10


def test_bilinearity_and_zero():
    f1, f2 = W.log_bump(1.2, 2.0), W.gaussian_log_bump(1.8, 0.1)
    g = W.log_bump(1.1, 3.0)
    lhs = W.quadratic_form(f1 + f2, g)
    assert lhs == pytest.approx(W.quadratic_form(f1, g) + W.quadratic_form(f2, g), abs=1e-9)
    assert W.quadratic_form(g * 0.0, g) == 0


def test_load_zeros(tmp_path, zeros):
    assert zeros.count == 1000
    assert zeros.ordinates[0] == pytest.approx(14.134725141734693, abs=1e-9)
    sample = W.load_zeros(W.find_zero_table("sample100.txt"))
    assert sample.count == 100 and np.array_equal(sample.ordinates, zeros.ordinates[:100])
    bad = tmp_path / "bad.txt"
    bad.write_text("14.13\n21.02\nabc\n")
    with pytest.raises(W.ZeroTableError, match=":3:"):
        W.load_zeros(bad)
    bad.write_text("21.02\n14.13\n")
    with pytest.raises(W.ZeroTableError, match=":2:"):
        W.load_zeros(bad)


def test_data_dir_env(tmp_path, monkeypatch):
    (tmp_path / "mine.txt").write_text("14.1347\n")
    monkeypatch.setenv("TROPOS_DATA_DIR", str(tmp_path))
    assert W.load_zeros(W.find_zero_table("mine.txt")).count == 1
    with pytest.raises(W.ZeroTableError):
        W.find_zero_table("missing.txt")


def test_mellin_oracle():
    f = W.gaussian_log_bump(2.5, 0.2)
    s = 0.5 + 30j
    re = quad_u(lambda u: float(f(u)) * (u ** (s - 1)).real, *f.support)
    im = quad_u(lambda u: float(f(u)) * (u ** (s - 1)).imag, *f.support)
    assert complex(W.mellin(f, s)[0]) == pytest.approx(complex(re, im), abs=1e-11)


def test_smooth_part_oracle():
    f = bump_2129()
    oracle = quad_u(lambda u: float(f(u)) * (u + 1) / u, 2.1, 2.9)
    assert W.counting_smooth_part(f) == pytest.approx(oracle, abs=1e-9)


def test_counting_pair_rejects_one(zeros):
    with pytest.raises(PreconditionError):
        W.counting_pair(W.log_bump(0.9, 2.0), zeros)


def test_zero_tail_small(zeros):
    f = W.gaussian_log_bump(math.e, 0.1)
    terms = W.zero_terms(f, zeros)
    total = W.counting_pair(f, zeros)
    assert abs(terms[899:].sum()) < 1e-4 * abs(total)


@pytest.mark.parametrize("f", [bump_2129(), W.gaussian_log_bump(3.0, 0.25, (1.5, 6.0)), W.log_bump(2.1, 2.9)],
                         ids=["gauss-2.1-2.9", "gauss-1.5-6", "bump-2.1-2.9"])
def test_explicit_formula_converges(f, zeros):
    res = [W.explicit_formula_check(f, zeros.head(n))["residual"] for n in (100, 300, 1000)]
    for a, b in zip(res, res[1:]):
        assert b <= 1.1 * a
    assert res[-1] <= 0.01 * abs(W.weil_distribution(f))


def test_threads_bit_stable(zeros):
    f = W.log_bump(1.5, 6.0)
    assert W.counting_pair(f, zeros, threads=1) == W.counting_pair(f, zeros, threads=4)


def test_symmetric_function_sees_half_the_zero_side(zeros):
    # for h = h~ the u >= 1 functional is half of the full zero-side sum
    b = W.log_bump(0.4, 2.5)
    h = W.TestFunction.from_callable(lambda u: b(u) / np.sqrt(u), (0.4, 2.5))
    assert W.involution(h).sup_distance(h) < 1e-12
    m0, m1 = W.moments(h)
    full = m0 + m1 - 2 * float(np.sum(W.mellin(h, 0.5 + 1j * zeros.ordinates).real))
    assert W.weil_distribution(h) == pytest.approx(0.5 * full, abs=1e-9)


def test_quadratic_form_is_minus_zero_sum(zeros):
    f0 = W.gaussian_log_bump(2.2, 0.15, (1.6, 3.2))
    f = W.project_admissible(f0, W.log_bump(1.6, 2.2), W.log_bump(2.2, 3.2))
    assert max(abs(m) for m in W.moments(f)) < 1e-12
    s = W.quadratic_form(f, f)
    zero_sum = float(np.sum(np.abs(W.mellin(f, 0.5 + 1j * zeros.ordinates)) ** 2))
    assert s < 0
    assert s == pytest.approx(-zero_sum, rel=1e-6)
