"""Ideals of jets and their allowed / forbidden directions.

An ideal generated by jets without constant term is a finite-dimensional
rational subspace; membership is exact linear algebra.  A direction on
the sphere is *forbidden* when finitely many ideal elements dominate
c|x|^m on a small cone around it, and *allowed* otherwise.
"""

from jetideals import (JetIdeal, RingSignature, allow_overapprox,
                       forbidden_certificate_search, jet_parse,
                       verify_forbidden_certificate)

sig = RingSignature(2, 3)
I = JetIdeal(sig, [jet_parse("x^2", sig), jet_parse("y^2 - x*z", sig)])
print(I)
print("contains x*y?", I.contains(jet_parse("x*y", sig)))

aset = allow_overapprox(I)
print("allowed directions (exact):",
      [d.vec for d in aset.directions])

# a sum of squares dominates |x|^2 everywhere: every direction is
# forbidden, certified by interval subdivision over a sphere cover
sig2 = RingSignature(2, 2)
jets = [jet_parse("x^2 + y^2", sig2)]
cert = forbidden_certificate_search(jets, None)
print("whole-sphere certificate: c =", cert.c)
verdict, bound, depth = verify_forbidden_certificate(jets, 0.5)
print(f"claim c = 1/2: {verdict} (proved bound {bound:.4f} "
      f"at depth {depth})")
