"""Jet rings: truncated arithmetic and composition.

A jet of order m in n variables is a polynomial of degree <= m with the
product truncated at degree m.  Truncation has real consequences: the
top power of a coordinate annihilates the coordinate itself.
"""

from jetideals import DiffeoJet, RingSignature, jet_compose, jet_parse

sig = RingSignature(3, 1)     # m = 3, one variable

x3 = jet_parse("x^3", sig)
x = jet_parse("x", sig)
print("x^3 * x =", x3 * x, "   (degree 4 truncates away)")

p = jet_parse("x^2", sig)
phi = DiffeoJet(sig, [jet_parse("x + x^2", sig)])
q = jet_compose(p, phi)
print("x^2 composed with x + x^2 =", q)
print("order of vanishing:", p.order_of_vanishing(), "->",
      q.order_of_vanishing(), "(preserved)")
print("polynomial degree:  ", p.degree(), "->", q.degree(),
      "(not preserved)")

# coefficients are exact rationals throughout
sig2 = RingSignature(2, 2)
a = jet_parse("x/3 + y/7", sig2)
print("(x/3 + y/7)^2 =", a * a)
