"""The annulus-scale conditions C, C*, C** for a cutoff decomposition.

Condition C asks for derivative bounds on a fixed annulus Ann_4(rho) and
the identity p = F + sum S_l Q_l near the allowed directions on
Ann_2(rho).  C* is the same statement after zooming to the unit annulus;
C** multiplies by a radial bump chi to obtain globally bounded functions
at the cost of a measured constant.
"""

from fractions import Fraction

from jetideals import RingSignature, check_annulus_condition, expr_parse, jet_parse

A, eps = 1e9, 1e-3
delta = r = eps / A
rho = r / 2
params = {"A": A, "eps": eps, "delta": delta, "r": r, "rho": rho}

sig = RingSignature(2, 3)
p = jet_parse("x*y", sig)
Q = [jet_parse("y^2 - x*z", sig)]
s1 = Fraction(delta) * Fraction(rho)
s2 = Fraction(rho)
F = expr_parse(f"(y^3/z) * theta(norm(x,y), {s1.numerator}/{s1.denominator})", 3)
S = [expr_parse(f"-(y/z) * theta(norm(x,y), {s2.numerator}/{s2.denominator})", 3)]
poles = [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]

for variant in ("C", "C*"):
    rep = check_annulus_condition(variant, params, p, Q, F, S, poles)
    print(f"{variant:3s} -> {rep['verdict']} "
          f"(identity: {rep['identity']['method']})")
# C** also reports the measured bump constant (slow-ish: global bounds)
rep = check_annulus_condition("C**", params, p, Q, F, S, poles)
print(f"C** -> {rep['verdict']} (chi constant {rep['chi_constant']:.1f}, "
      f"global bound target {rep['A_target']:.3g})")
