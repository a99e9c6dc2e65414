"""Certificate verification: flat/tame sweeps, negligibility, strong
implication, annulus conditions."""

import math
from fractions import Fraction

import pytest

from jetideals.errors import DomainError
from jetideals.geometry import Cone, Direction
from jetideals.ideal import JetIdeal
from jetideals.jetring import RingSignature, jet_parse
from jetideals.symfun import expr_eval, expr_parse
from jetideals.verifier import (ImplicationCertificate,
                                check_annulus_condition, check_flat,
                                check_flat_tame_product, check_negligible,
                                check_strong_directional, check_strong_global,
                                check_tame, delta_ladder, expr_scale_coords,
                                measure_chi_constant, meet,
                                symbolic_residual_zero)

POLES = [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]


def pole_cone(delta=0.4):
    return Cone([Direction(w) for w in POLES], delta, 1.0)


def test_meet_ordering():
    assert meet("pass", "pass") == "pass"
    assert meet("pass", "inconclusive") == "inconclusive"
    assert meet("inconclusive", "fail") == "fail"
    assert meet() == "pass"


def test_flat_pass_for_higher_order_monomial():
    report = check_flat(expr_parse("x^3", 1), None, 2, 1)
    assert report.verdict == "pass"


def test_flat_rejects_same_order():
    # x^2 is not o(|x|^2): the shell ratio is constant
    report = check_flat(expr_parse("x^2", 1), None, 2, 1)
    assert report.verdict != "pass"


def test_flat_borderline_is_not_pass():
    # y^3/z is exactly O(|x|^m) near the poles (homogeneous of degree
    # m = 2), so the shell ratios are scale-invariant: not flat, and not
    # refutable either
    report = check_flat(expr_parse("y^3/z", 3), pole_cone(), 2, 3)
    assert report.verdict == "inconclusive"


def test_flat_pass_above_critical_degree():
    # one extra degree of homogeneity makes the shell ratios decay
    report = check_flat(expr_parse("y^3*norm(x,y,z)/z", 3), pole_cone(),
                        2, 3)
    assert report.verdict == "pass"


def test_tame_bounded_ratio_passes():
    report = check_tame(expr_parse("x^2/(x^2 + y^2)", 2), None, 2, 2)
    assert report.verdict == "pass"
    assert report.constant is not None and report.constant < 10


def test_tame_witness_on_claimed_bound():
    report = check_tame(expr_parse("x^2/(x^2 + y^2)", 2), None, 2, 2,
                        bound=0.1)
    assert report.verdict == "fail"
    assert report.witness is not None
    assert report.witness["claimed_bound"] == 0.1


def test_tame_rejects_blowup():
    report = check_tame(expr_parse("1/norm(x,y)", 2), None, 2, 2)
    assert report.verdict == "fail"


def test_flat_tame_product():
    out = check_flat_tame_product(expr_parse("x^3 + y^3", 2),
                                  expr_parse("x^2/(x^2 + y^2)", 2),
                                  None, 2, 2)
    assert out["verdict"] == "pass"
    assert out["leibniz_bound_ok"]


def test_flat_tame_product_rejects_bad_tame_factor():
    with pytest.raises(DomainError):
        check_flat_tame_product(expr_parse("x^3", 2),
                                expr_parse("1/norm(x,y)", 2), None, 2, 2)


# -- negligibility ----------------------------------------------------------

def test_delta_ladder_shrinks_and_caps():
    for eps in (1.0, 0.1, 1e-3):
        assert all(0 < d < 0.25 for d in delta_ladder(eps))
    ladder = delta_ladder(0.1)
    assert ladder == sorted(ladder, reverse=True)
    assert delta_ladder(1e-3)[0] == pytest.approx(5e-5)


def test_negligible_y3_over_z_at_poles():
    cert = check_negligible(expr_parse("y^3/z", 3), POLES, 2, 3)
    assert cert.verdict == "pass"
    for rec in cert.records:
        assert rec["verdict"] == "pass"
        assert rec["delta"] < 0.25 and 0 < rec["r"] <= 1.0


def test_negligible_fail_with_witness():
    diag = [(1 / math.sqrt(2), 1 / math.sqrt(2))]
    cert = check_negligible(expr_parse("x*y", 2), diag, 2, 2,
                            eps_grid=(0.1,))
    assert cert.verdict == "fail"
    w = cert.records[0]["witness"]
    assert w is not None
    # the witness is a genuine point evaluation above the claimed bound
    val = abs(expr_eval(expr_parse("x*y", 2), tuple(w["point"])))
    assert val == pytest.approx(w["value"]) and val > w["bound"]


def test_negligible_vacuous_for_empty_omega():
    cert = check_negligible(expr_parse("x*y", 2), [], 2, 2)
    assert cert.verdict == "pass"
    assert cert.records[0]["vacuous"]


def test_negligible_radius_absorbs_extra_homogeneity():
    # x^4 has homogeneity 4 > m = 3: negligible only on a small ball
    cert = check_negligible(expr_parse("x^4", 2), [(1.0, 0.0)], 3, 2,
                            eps_grid=(0.01,))
    assert cert.verdict == "pass"
    assert cert.records[0]["r"] < 1.0


# -- strong implication -----------------------------------------------------

def xy_certificate():
    sig = RingSignature(2, 3)
    I = JetIdeal(sig, [jet_parse("x^2", sig), jet_parse("y^2 - x*z", sig)])
    return ImplicationCertificate(
        I, jet_parse("x*y", sig),
        [(jet_parse("y^2 - x*z", sig), expr_parse("-y/z", 3), 50.0)],
        expr_parse("y^3/z", 3))


def test_symbolic_residual_zero_exact():
    cert = xy_certificate()
    assert symbolic_residual_zero(cert.target, cert.terms, cert.F)
    bad = ImplicationCertificate(cert.ideal, cert.target, cert.terms,
                                 expr_parse("y^3/z + x", 3))
    assert not symbolic_residual_zero(bad.target, bad.terms, bad.F)


def test_strong_directional_allowed_pole():
    report = check_strong_directional(xy_certificate(),
                                      Direction((0.0, 0.0, 1.0)))
    assert report["verdict"] == "pass"
    assert report["identity_residual_zero"]


def test_strong_global_conclusions():
    report = check_strong_global(xy_certificate())
    assert report["verdict"] == "pass"
    assert any("cl(I)" in c for c in report["conclusions"])
    assert any("not closed" in c for c in report["conclusions"])


def test_strong_rejects_term_outside_ideal():
    sig = RingSignature(2, 3)
    I = JetIdeal(sig, [jet_parse("x^2", sig)])
    cert = ImplicationCertificate(
        I, jet_parse("x*y", sig),
        [(jet_parse("y^2 - x*z", sig), expr_parse("-y/z", 3), 50.0)],
        expr_parse("y^3/z", 3))
    with pytest.raises(DomainError):
        check_strong_directional(cert, Direction((0.0, 0.0, 1.0)))


def test_strong_scope_must_cover_allowed_directions():
    cert = xy_certificate()
    cert.scope = [(0.0, 0.0, 1.0)]     # misses the south pole
    with pytest.raises(DomainError):
        check_strong_global(cert)


def test_strong_vacuous_for_empty_allow():
    sig = RingSignature(2, 2)
    I = JetIdeal(sig, [jet_parse("x^2 + y^2", sig)])
    cert = ImplicationCertificate(I, jet_parse("x*y", sig), [],
                                  expr_parse("x*y", 2))
    report = check_strong_global(cert)
    assert report["verdict"] == "pass" and report["vacuous"]


# -- annulus conditions -----------------------------------------------------

def intro_data():
    A, eps = 1e9, 1e-3
    delta = r = eps / A
    rho = r / 2
    sig = RingSignature(2, 3)
    s1 = Fraction(delta) * Fraction(rho)
    s2 = Fraction(rho)
    F = expr_parse(f"(y^3/z) * theta(norm(x,y), "
                   f"{s1.numerator}/{s1.denominator})", 3)
    S = expr_parse(f"-(y/z) * theta(norm(x,y), "
                   f"{s2.numerator}/{s2.denominator})", 3)
    params = {"A": A, "eps": eps, "delta": delta, "r": r, "rho": rho}
    return (params, jet_parse("x*y", sig),
            [jet_parse("y^2 - x*z", sig)], F, [S])


def test_annulus_condition_c():
    params, p, Q, F, S = intro_data()
    report = check_annulus_condition("C", params, p, Q, F, S, POLES, seed=0)
    assert report["verdict"] == "pass"
    assert report["identity"]["method"] == "plateau-certified symbolic"
    assert report["identity"]["zero"]


def test_annulus_condition_c_star():
    params, p, Q, F, S = intro_data()
    report = check_annulus_condition("C*", params, p, Q, F, S, POLES, seed=0)
    assert report["verdict"] == "pass"
    for row in report["bounds"]:
        assert row["max_ratio"] <= 1.0 + 1e-9


def test_annulus_unknown_variant():
    params, p, Q, F, S = intro_data()
    with pytest.raises(DomainError):
        check_annulus_condition("D", params, p, Q, F, S, POLES)


def test_annulus_needs_positive_rho():
    params, p, Q, F, S = intro_data()
    params = dict(params, rho=0.0)
    with pytest.raises(DomainError):
        check_annulus_condition("C", params, p, Q, F, S, POLES)


def test_chi_constant_scaling():
    # 2^m times the measured cutoff-product constant, at least 2^m
    assert measure_chi_constant(2, 2, seed=0) >= 4.0


def test_expr_scale_coords():
    e = expr_parse("x^2*y + norm(x,y)", 2)
    scaled = expr_scale_coords(e, Fraction(1, 2))
    x = (0.6, 0.8)
    half = tuple(0.5 * c for c in x)
    assert expr_eval(scaled, x) == pytest.approx(expr_eval(e, half), rel=1e-12)
