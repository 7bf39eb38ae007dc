"""Quick sanity checks per subcommand, run by ``tropos <cmd> --selftest``."""
from __future__ import annotations

import math
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from tropos.errors import PreconditionError

__all__ = ["CHECKS", "run_checks"]


def _raises(fn, exc=PreconditionError) -> bool:
    try:
        fn()
    except exc:
        return True
    return False


def _pwa():
    from tropos import pwa as P

    f = P.affine(3)
    lam0 = Fraction(1, 3)
    ramp = P.max_of_lines([(0, 0), (1, -lam0)])
    c = Fraction(2)
    m = P.pointwise_max(P.affine(-1), P.affine(0, 0, c))
    return {
        "evaluate affine": P.evaluate(f, 2) == 6,
        "evaluate at breakpoint": P.evaluate(ramp, lam0) == 0,
        "laplacian of affine": len(P.laplacian(f)) == 0,
        "laplacian of ramp": P.laplacian(ramp) == P.Divisor(((lam0, 1),)),
        "scale by 1": P.scale_argument(ramp, 1) == ramp,
        "scale by 2 moves zero to half": P.laplacian(P.scale_argument(ramp, 2)).positions == [lam0 / 2],
        "add zero": P.add(ramp, P.affine(0)) == ramp,
        "max single crossing": m.breakpoints == (-c,),
        "rr empty": P.rr_solve(P.Divisor(())) == P.affine(0),
        "rr negative atom": (P.Divisor(((lam0, -1),)) + P.laplacian(P.rr_solve(P.Divisor(((lam0, -1),))))).degree == 0,
    }


def _newton():
    from tropos import newton as N
    from tropos.pwa import Divisor

    mono = N.ValuedSeries(2, {3: 1})
    shifted = N.ValuedSeries(2, {0: 1, 1: 0, 2: 2})
    up = N.ValuedSeries(2, {0: 4, 1: 3, 2: 5})
    lin = N.ValuedSeries.from_polynomial([-8, 1], 2)
    one = N.ValuedSeries.from_polynomial([1], 2)
    quad = N.ValuedSeries.from_polynomial([1, 1, 2], 2)
    t, tu = N.tropicalize_na(shifted), N.tropicalize_na(up)
    return {
        "monomial is affine": N.tropicalize_na(mono).breakpoints == () and N.tropicalize_na(mono).slopes == (-3,),
        "constant shift": all(tu(x) == t(x) - 3 for x in (-2, 0, Fraction(1, 2), 3)),
        "X - a": N.root_valuations(lin) == Divisor(((3, 1),)),
        "s * 1 = s": N.series_product_valuations(quad, one).coeffs == quad.coeffs,
    }


def _jensen():
    from tropos.jensen import AnnulusFunction, tropical_profile, tropicalize_c, winding_number

    const = AnnulusFunction(lambda z: np.full(np.shape(z), 2.5 + 0j))
    cube = AnnulusFunction(lambda z: z**3, r1=0.0)
    ex = AnnulusFunction.exponential_sum([(1, 1)])
    prof = tropical_profile(ex, np.linspace(-1, 1, 9))
    return {
        "constant mean": abs(tropicalize_c(const, 0.3) - math.log(2.5)) < 1e-14,
        "z^3 mean": abs(tropicalize_c(cube, 0.7) + 2.1) < 1e-12,
        "z^3 winds 3": all(winding_number(cube, x) == 3 for x in (-1.0, 0.0, 2.0)),
        "constant winds 0": winding_number(const, 0.0) == 0,
        "exp has no zeros": prof.breakpoints == (),
    }


def _apseq():
    from tropos.apseq import APSequence, empirical_distribution, epsilon_period_check, gap_plateau_check, u_value

    seq = APSequence(2)
    dist = empirical_distribution(np.full(1000, 0.25))
    return {
        "U(0) = 0": u_value(seq, 0) == 0,
        "m = 0 bound": epsilon_period_check(seq, 0, range(-50, 50), range(-3, 4)),
        "injected violation": not epsilon_period_check(seq, 3, range(0, 20), [1], U=lambda x: Fraction(x % 7, 7)),
        "constant distribution": dist(0.2) == 0 and dist(0.25) == 1,
        "constant h plateau": gap_plateau_check(lambda u: np.full_like(u, 0.7), (0.8, 0.9), 1024) in (0, 1),
        "identity h, no gap": _raises(lambda: gap_plateau_check(lambda u: u, (0.2, 0.3), 1024)),
    }


def _lift():
    from tropos.lift import Density, DensityDivisor, build_lift, pair_with_test, quantile

    beta = Density.polynomial([0, 6, -6], (0, 1))
    uni = Density.polynomial([1], (0, 1))
    same = DensityDivisor(beta, beta)
    L = build_lift(same, 200)
    return {
        "beta median": abs(quantile(beta, 0.5) - 0.5) < 1e-12,
        "uniform quantile": abs(quantile(uni, 0.3) - 0.3) < 1e-12,
        "equal parts cancel": np.array_equal(L.plus, L.minus) and pair_with_test(L, np.sin, 200) == 0,
        "psi = 1": pair_with_test(L, lambda x: np.ones_like(x), 100) == 0,
    }


def _jessen():
    from tropos.jessen import ExponentialSum, jessen_function, zero_count, zero_density_check

    const = ExponentialSum((0.0,), (3.0,))
    f = ExponentialSum.parse("1,-1@log2")
    rep = zero_density_check(ExponentialSum.parse("1,0.25@log2"), -0.5, 1.0, T=200)
    return {
        "constant": abs(jessen_function(const, 0.4, 200) - math.log(3)) < 1e-14,
        "doubled term doubles count": zero_count(f * f, -1, 1, 200)[0] == 2 * zero_count(f, -1, 1, 200)[0],
        "zero-free strip": rep["zeros"] == 0 and abs(rep["slope_jump_density"]) < 1e-3,
    }


def _weil():
    from tropos import weil as W

    b = W.log_bump(2.5, 3.5)
    zero = b * 0.0
    g = W.log_bump(0.5, 2.0)
    sym = W.TestFunction.from_callable(lambda u: g(u) / np.sqrt(u), (0.5, 2.0))
    five = W.TestFunction.from_callable(lambda u: 5 * W.log_bump(1.5, 2.5)(u) / W.log_bump(1.5, 2.5)(2.0), (1.5, 2.5))
    with tempfile.TemporaryDirectory() as d:
        empty, two = Path(d, "e.txt"), Path(d, "t.txt")
        empty.write_text("")
        two.write_text("14.13\n21.02\n")
        empty_ok = _raises(lambda: W.load_zeros(empty))
        two_ok = W.load_zeros(two).count == 2
    Z = W.ZeroTable(np.array([14.134725]))
    terms = W.omega_terms()
    return {
        "Lambda(8)": W.mangoldt(8) == math.log(2),
        "Lambda(6)": W.mangoldt(6) == 0,
        "E beyond support": W.summation_E(b, 4.0) == 0,
        "E single term": W.summation_E(b, 1.0) == float(b(3.0)),
        "N(0) = 0": W.weil_distribution(zero) == 0,
        "symmetric fixed point": W.involution(sym).sup_distance(sym) < 1e-12,
        "g(2) = 5": abs(float(W.involution(five)(0.5)) - 10) < 1e-12,
        "support product": W.mult_convolve(W.log_bump(1, 2), W.log_bump(1, 2)).support == (1.0, 4.0),
        "s(0, g) = 0": W.quadratic_form(zero, b) == 0,
        "empty zero file": empty_ok,
        "two-line zero file": two_ok,
        "counting f = 0": W.counting_pair(zero, Z) == 0,
        "omega summands": W.omega_at_one() == math.fsum(terms) and terms[0] == 0.5,
    }


def _witt():
    from tropos import witt as X

    w = X.teichmuller(2) + 3 * X.teichmuller(Fraction(5, 7))
    q = X.q_function(0.2, Fraction(1, 3))
    root = X.q_function(0.2, Fraction(1, 3), Fraction(1, 2))
    F = X.q_grid(6, 6)
    const = X.LeafGridFunction.from_function(lambda x, y: X.WittElement.constant(2 - 1j), np.linspace(0, 1, 6),
                                             [Fraction(k, 4) for k in range(1, 7)])
    return {
        "[1] is the unit": X.teichmuller(1) * w == w,
        "[2][3] = [6]": X.teichmuller(2) * X.teichmuller(3) == X.teichmuller(6),
        "theta_1": X.theta(1, w) == w,
        "theta_2[3] = [9]": X.theta(2, X.teichmuller(3)) == X.teichmuller(9),
        "chi of [x]": abs(X.chi(Fraction(3, 2), X.teichmuller(4)) - 8) < 1e-12,
        "sqrt(q)^2 keys": (root * root).same_keys(q),
        "Fr_1 identity": X.frobenius_lift(1, F) == F,
        "constant residual": X.holomorphy_residual(const, 1.5) < 1e-12,
    }


CHECKS = {
    "pwa": _pwa,
    "newton": _newton,
    "jensen": _jensen,
    "apseq": _apseq,
    "lift": _lift,
    "jessen": _jessen,
    "weil": _weil,
    "witt": _witt,
}


def run_checks(name: str, out=print) -> bool:
    results = CHECKS[name]()
    for label, ok in results.items():
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {label}")
    return all(results.values())
