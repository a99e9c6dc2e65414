"""Strong implication: p = sum S_l Q_l + F with tame S and negligible F.

The certificate below shows xy lies in the closure of <x^2, y^2 - xz>
without lying in the ideal itself, so the ideal is not closed.  The
identity xy = (-y/z)(y^2 - xz) + y^3/z is checked symbolically (exact
zero residual); -y/z is tame near the poles; y^3/z is negligible there.
"""

import json

from jetideals import (ImplicationCertificate, JetIdeal, RingSignature,
                       check_strong_global, expr_parse, jet_parse)

sig = RingSignature(2, 3)
I = JetIdeal(sig, [jet_parse("x^2", sig), jet_parse("y^2 - x*z", sig)])
cert = ImplicationCertificate(
    I, jet_parse("x*y", sig),
    terms=[(jet_parse("y^2 - x*z", sig), expr_parse("-y/z", 3), 50.0)],
    F=expr_parse("y^3/z", 3))

report = check_strong_global(cert)
print("verdict:", report["verdict"])
for d in report["directions"]:
    print("  direction", d["omega"], "->", d["verdict"],
          "| identity residual zero:", d["identity_residual_zero"])
print(json.dumps(report["conclusions"], indent=2))
