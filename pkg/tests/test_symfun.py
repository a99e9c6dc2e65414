"""Scalar expression trees: differentiation, evaluation, cutoffs, gauges."""

import math
import random
from fractions import Fraction

import pytest

from jetideals.errors import DomainError, ParseError
from jetideals.interval import Interval
from jetideals.symfun import (Const, Coord, Cutoff, CutoffSpec,
                              DEFAULT_CUTOFF, Gauge, Norm, ZERO, add, div,
                              expr_derive, expr_diff, expr_eval, expr_parse,
                              expr_str, gauge_regularize, hom_degree, ipow,
                              mul)


def fd_partial(e, x, i, h=1e-6):
    xp = list(x)
    xm = list(x)
    xp[i] += h
    xm[i] -= h
    return (expr_eval(e, tuple(xp)) - expr_eval(e, tuple(xm))) / (2 * h)


CASES = [
    ("x^2*y - y^3/3", 2),
    ("x*y/(x^2 + y^2)", 2),
    ("norm(x,y)^3", 2),
    ("y^3/z", 3),
    ("(x + 2y)(x - z) / (1 + abs2(x,y,z))", 3),
]


@pytest.mark.parametrize("text,n", CASES)
def test_derivative_matches_finite_difference(text, n):
    e = expr_parse(text, n)
    rng = random.Random(hash(text) & 0xFFFF)
    for _ in range(20):
        x = tuple(rng.uniform(0.2, 1.0) for _ in range(n))
        for i in range(n):
            sym = expr_eval(expr_diff(e, i), x)
            num = fd_partial(e, x, i)
            assert abs(sym - num) <= 1e-6 * max(1.0, abs(sym))


def test_expr_derive_multi_index():
    e = expr_parse("x^3*y^2", 2)
    d = expr_derive(e, (2, 1))     # 12 x y
    assert abs(expr_eval(d, (0.5, 2.0)) - 12 * 0.5 * 2.0) < 1e-12


def test_interval_eval_contains_float_eval():
    rng = random.Random(77)
    for text, n in CASES:
        e = expr_parse(text, n)
        for _ in range(30):
            lo = [rng.uniform(0.2, 0.8) for _ in range(n)]
            box = [Interval(c, c + rng.uniform(0, 0.2)) for c in lo]
            enc = expr_eval(e, box, mode="interval")
            mid = tuple(iv.mid for iv in box)
            assert enc.lo <= expr_eval(e, mid) <= enc.hi


def test_eval_domain_guard():
    e = expr_parse("1/x", 1)
    with pytest.raises(DomainError):
        expr_eval(e, [Interval(-1.0, 1.0)], mode="interval")


def test_hom_degree():
    assert hom_degree(expr_parse("x^2*y", 2)) == 3
    assert hom_degree(expr_parse("y^3/z", 3)) == 2
    assert hom_degree(expr_parse("norm(x,y)", 2)) == 1
    assert hom_degree(expr_parse("x + x^2", 1)) is None
    assert hom_degree(Cutoff(DEFAULT_CUTOFF, Norm((0,)), 1)) is None


def test_parse_print_eval_roundtrip():
    rng = random.Random(3)
    for text, n in CASES:
        e = expr_parse(text, n)
        back = expr_parse(expr_str(e, n), n)
        for _ in range(10):
            x = tuple(rng.uniform(0.3, 1.0) for _ in range(n))
            assert abs(expr_eval(e, x) - expr_eval(back, x)) < 1e-12


def test_parse_error_reports_position():
    with pytest.raises(ParseError):
        expr_parse("x +", 2)
    with pytest.raises(ParseError):
        expr_parse("theta(x)", 2)      # missing scale


# -- cutoffs ----------------------------------------------------------------

def test_cutoff_plateau_and_support():
    spec = DEFAULT_CUTOFF
    assert spec.eval(0.0) == 1.0
    assert spec.eval(float(spec.a)) == 1.0
    assert spec.eval(float(spec.b)) == 0.0
    assert spec.eval(100.0) == 0.0
    mid = spec.eval(0.5 * float(spec.a + spec.b))
    assert 0.0 < mid < 1.0
    # monotone decreasing across the ramp
    samples = [spec.eval(float(spec.a) + t * float(spec.b - spec.a))
               for t in [k / 50 for k in range(51)]]
    assert all(a >= b - 1e-15 for a, b in zip(samples, samples[1:]))


def test_cutoff_smoothness_at_junctions():
    # q vanishing derivatives where the ramp meets plateau and support
    spec = CutoffSpec(q=3, a=4, b=8)
    for k in range(1, spec.q + 1):
        assert abs(spec.eval(4.0, order=k)) < 1e-12
        assert abs(spec.eval(8.0, order=k)) < 1e-12


def test_cutoff_derivative_bounds_are_certified():
    spec = CutoffSpec(q=3, a=4, b=8)
    rng = random.Random(13)
    for k in range(spec.q + 1):
        bound = spec.derivative_bounds[k]
        for _ in range(500):
            v = rng.uniform(0.0, 10.0)
            assert abs(spec.eval(v, order=k)) <= bound + 1e-12


def test_cutoff_derivative_past_smoothness_raises():
    e = Cutoff(DEFAULT_CUTOFF, Norm((0, 1)), 1, order=DEFAULT_CUTOFF.q)
    with pytest.raises(DomainError):
        expr_diff(e, 0)


def test_cutoff_expr_derivative_matches_fd():
    e = Cutoff(DEFAULT_CUTOFF, Norm((0, 1)), Fraction(1, 10))
    # the ramp lives at |x| in [0.4, 0.8]
    x = (0.42, 0.31)
    d = expr_diff(e, 0)
    assert abs(expr_eval(d, x) - fd_partial(e, x, 0, h=1e-7)) < 1e-5


def test_cutoff_interval_eval_sound():
    e = Cutoff(DEFAULT_CUTOFF, Norm((0,)), Fraction(1, 10))
    box = [Interval(0.3, 0.9)]
    enc = expr_eval(e, box, mode="interval")
    for v in (0.3, 0.5, 0.7, 0.9):
        assert enc.lo - 1e-12 <= expr_eval(e, (v,)) <= enc.hi + 1e-12


# -- gauges -----------------------------------------------------------------

def test_gauge_eval_and_clamp():
    g = Gauge.from_function("sqrt", math.sqrt, per_octave=8)
    assert abs(g.eval(0.25) - 0.5) < 1e-12
    assert g.eval(1.0) <= 1.0
    with pytest.raises(DomainError):
        g.eval(0.0)


def test_gauge_regularize_sqrt_quick():
    g = Gauge.from_function("sqrt", math.sqrt, per_octave=64)
    reg = gauge_regularize(g, check_scales=10)
    rep = reg.report
    assert rep["envelope_dominates"]
    assert rep["quasi_doubling_ok"]
    assert rep["decays"]
    # g+ dominates g~ dominates g
    for t in (2.0 ** -k for k in range(1, 20)):
        assert reg.g_plus(t) >= reg.g_tilde(t) - 1e-12
        assert reg.g_tilde(t) >= g.eval(t) - 1e-12


def test_gauge_ref_not_differentiable():
    g = Gauge.from_function("sqrt", math.sqrt, per_octave=8)
    e = expr_parse("gauge(sqrt, norm(x))", 1, gauges={"sqrt": g})
    assert expr_eval(e, (0.25,)) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(DomainError):
        expr_diff(e, 0)


def test_smart_constructors_fold_constants():
    assert add(Const(2), Const(3)) == Const(5)
    assert mul(Const(0), Coord(0)) == ZERO
    assert ipow(Const(2), 3) == Const(8)
    assert div(Coord(0), Const(2)) == mul(Const(Fraction(1, 2)), Coord(0))
    with pytest.raises(DomainError):
        div(Coord(0), Const(0))
