import random
from fractions import Fraction

import pytest

from jetideals.jetring import DiffeoJet, Jet, RingSignature


def random_fraction(rng, span=6):
    num = rng.randint(-span, span)
    den = rng.randint(1, 4)
    return Fraction(num, den)


def random_jet(rng, sig, density=5, allow_constant=True):
    """A sparse random jet: up to `density` monomials."""
    coeffs = {}
    monos = list(sig.monomials)
    if not allow_constant:
        monos = [a for a in monos if sum(a) > 0]
    for alpha in rng.sample(monos, min(density, len(monos))):
        c = random_fraction(rng)
        if c != 0:
            coeffs[alpha] = c
    return Jet(sig, coeffs)


def random_diffeo(rng, sig, tries=50):
    """A random origin-fixing jet map with invertible linear part."""
    for _ in range(tries):
        comps = []
        for _ in range(sig.n):
            p = random_jet(rng, sig, density=4, allow_constant=False)
            comps.append(p)
        try:
            return DiffeoJet(sig, comps)
        except ValueError:
            continue
    # fall back to a shear of the identity, always invertible
    comps = [Jet.variable(sig, i) for i in range(sig.n)]
    return DiffeoJet(sig, comps)


@pytest.fixture
def rng():
    return random.Random(12345)
