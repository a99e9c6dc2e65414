"""Negligible functions: small relative to |x|^m on a cone.

F is negligible for a direction set Omega when, for every eps, all its
derivatives up to order m obey |d^a F| <= eps |x|^(m-|a|) on some cone
around Omega.  The checker reduces each derivative bound to a certified
dome bound on the sphere whenever the expression is homogeneous, and
absorbs surplus homogeneity into the cone radius.
"""

import json

from jetideals import check_negligible, expr_parse

POLES = [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]

F = expr_parse("y^3/z", 3)
cert = check_negligible(F, POLES, m=2, n=3)
print("y^3/z toward the poles:", cert.verdict)
for rec in cert.records:
    print(f"  eps = {rec['eps']:<6g} delta = {rec['delta']:<8g} "
          f"r = {rec['r']:.4g}")

# a genuine counterexample comes with a witness point
import math
diag = [(1 / math.sqrt(2), 1 / math.sqrt(2))]
bad = check_negligible(expr_parse("x*y", 2), diag, m=2, n=2,
                       eps_grid=(0.1,))
print("x*y toward the diagonal:", bad.verdict)
print("witness:", json.dumps(bad.records[0]["witness"], indent=2))
