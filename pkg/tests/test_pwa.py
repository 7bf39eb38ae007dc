import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropos.errors import DomainError, PreconditionError
from tropos.pwa import (
    INF,
    Divisor,
    PiecewiseAffine,
    add,
    affine,
    degree_between,
    evaluate,
    laplacian,
    max_of_lines,
    pointwise_max,
    rr_solve,
    scale_argument,
)
from tropos.selftest import run_checks

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
ints = st.integers(min_value=-6, max_value=6)
lines = st.lists(st.tuples(ints, fracs), min_size=1, max_size=6)


def brute_max(lns, x):
    return max(s * x + c for s, c in lns)


def test_selfchecks():
    assert run_checks("pwa", out=lambda _: None)


def test_two_branch_max_with_irrational_breakpoint():
    # max(-x, log 1/2): breakpoint at log 2, slopes (-1, 0)
    f = PiecewiseAffine((-INF, INF), (math.log(2),), (-1, 0), (0, 0))
    assert evaluate(f, 1) == pytest.approx(math.log(0.5), abs=1e-15)
    assert evaluate(f, -3) == pytest.approx(3)


def test_evaluate_outside_domain():
    f = PiecewiseAffine((0, 1), (), (1,), (Fraction(1, 2), 0))
    with pytest.raises(DomainError):
        evaluate(f, 2)


def test_newton_shape_example():
    f = max_of_lines([(0, 0), (-1, 0), (-2, -1)])
    assert f.slopes == (-2, -1, 0)
    assert laplacian(f) == Divisor(((-1, 1), (0, 1)))
    assert laplacian(add(f, f)) == Divisor(((-1, 2), (0, 2)))


def test_scale_argument_slope_jump():
    f = max_of_lines([(0, 0), (-1, 0)])
    g = scale_argument(f, 3)
    assert g == max_of_lines([(0, 0), (-3, 0)])
    assert laplacian(g) == Divisor(((0, 3),))
    with pytest.raises(PreconditionError):
        scale_argument(f, 0)


def test_rr_example():
    D = Divisor(((1, 2), (2, -3)))
    f = rr_solve(D)
    assert laplacian(f) == Divisor(((2, 3),))
    assert D + laplacian(f) == Divisor(((1, 2),))
    with pytest.raises(PreconditionError):
        rr_solve(Divisor(((1, Fraction(1, 2)),)))


def test_domain_mismatch():
    with pytest.raises(DomainError):
        add(affine(1, domain=(0, 1)), affine(1, domain=(0, 2)))


def test_json_round_trip():
    f = max_of_lines([(0, 0), (-1, Fraction(1, 3)), (-2, -1)])
    assert PiecewiseAffine.from_json(json.loads(json.dumps(f.to_json()))) == f
    D = laplacian(f)
    assert Divisor.from_json(json.loads(json.dumps(D.to_json()))) == D
    assert f.to_json()["breakpoints"][0] == "-4/3"


@given(lines, st.lists(fracs, min_size=1, max_size=8))
def test_max_of_lines_matches_brute_force(lns, xs):
    f = max_of_lines(lns)
    for x in xs:
        assert f(x) == brute_max(lns, x)
    assert f.is_convex() and laplacian(f).is_effective()


@given(lines, lines, st.lists(fracs, min_size=1, max_size=6))
def test_max_and_add_pointwise(l1, l2, xs):
    f, g = max_of_lines(l1), max_of_lines(l2)
    m, s = pointwise_max(f, g), add(f, g)
    for x in xs:
        assert m(x) == max(f(x), g(x))
        assert s(x) == f(x) + g(x)
    assert laplacian(s) == laplacian(f) + laplacian(g)
    assert pointwise_max(f, g) == pointwise_max(g, f)


@given(lines, st.integers(min_value=1, max_value=7))
def test_scaling_pushes_divisor_forward(lns, n):
    f = max_of_lines(lns)
    # x -> f(nx): atoms move to lambda/n and slope jumps are multiplied by n
    assert laplacian(scale_argument(f, n)) == laplacian(f).pushforward_div(n).scale(n)
    for x in (Fraction(-3), Fraction(1, 5), Fraction(4)):
        assert scale_argument(f, n)(x) == f(n * x)


@given(lines, fracs, fracs)
def test_degree_formula(lns, a, b):
    if a == b:
        return
    a, b = min(a, b), max(a, b)
    f = max_of_lines(lns)
    assert laplacian(f).restrict(a, b, closed=True).degree == f.slope_at(b) - f.left_slope_at(a)
    assert degree_between(f, a, b) == f.slope_at(b) - f.left_slope_at(a)


@given(st.lists(st.tuples(fracs, st.integers(-3, 3).filter(bool)), max_size=8))
def test_rr_solve_effective(atoms):
    D = Divisor(tuple(atoms))
    f = rr_solve(D)
    assert (D + laplacian(f)).is_effective()
    assert f.has_integral_slopes()


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=7), fracs)
def test_convexity_iff_effective(slopes, start):
    slopes = [s for i, s in enumerate(slopes) if i == 0 or s != slopes[i - 1]]
    bps = tuple(start + i for i in range(len(slopes) - 1))
    f = PiecewiseAffine((-INF, INF), bps, tuple(slopes), (0, 0))
    assert f.is_convex() == laplacian(f).is_effective()
