"""Gauge regularization and tangent-direction estimation.

A gauge is a positive scale function on (0, 1].  Regularization builds
the sup envelope g~ >= g with quasi-doubling factor <= 4, mollifies it
to g*, and calibrates g+ = C'' g* >= g~.  For g = sqrt the envelope
reproduces sqrt exactly (the defining sup is stationary at s = t).
"""

import math

from jetideals import (Gauge, estimate_tangent_directions, gauge_regularize)

g = Gauge.from_function("sqrt", math.sqrt)
reg = gauge_regularize(g)
rep = reg.report
print("envelope dominates g:   ", rep["envelope_dominates"])
print("quasi-doubling factor:  ", round(rep["quasi_doubling_factor"], 3))
print("derivative constants:   ",
      [round(c, 3) for c in rep["derivative_constants"]])
print("g+ decays over 20 scales:", rep["decays"])

# tangent directions of a sampled set: survivors must reappear in every
# dyadic shell of |x|
points = []
for k in range(21):
    points.append((0.0, 2.0 ** -k))
    points.append((0.0, -(2.0 ** -k)))
dirs = estimate_tangent_directions(points, delta_out=1e-3)
print("tangent directions of the sampled line {x = 0}:",
      [d.vec for d in dirs])
