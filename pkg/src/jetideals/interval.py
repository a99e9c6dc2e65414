"""Outward-rounded interval arithmetic.

Endpoints are floats.  Every arithmetic result is widened by one ulp on
each side, so enclosures stay sound under float rounding without pulling
in a multiprecision dependency.  That is cheap and more than enough for
the certificate searches here, which only need modest depth.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

_INF = math.inf


def _down(x: float) -> float:
    if x == -_INF or x != x:
        return x
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    if x == _INF or x != x:
        return x
    return math.nextafter(x, _INF)


class Interval:
    """A closed interval [lo, hi] with outward rounding."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if isinstance(lo, Fraction):
            lo = _down(float(lo))
        if isinstance(hi, Fraction):
            hi = _up(float(hi))
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    # -- constructors ---------------------------------------------------
    @staticmethod
    def exact(x) -> "Interval":
        """Tight interval around a number (widened if not a float)."""
        if isinstance(x, Interval):
            return x
        if isinstance(x, Fraction):
            f = float(x)
            if Fraction(f) == x:
                return Interval(f, f)
            return Interval(_down(f), _up(f))
        return Interval(float(x), float(x))

    @staticmethod
    def hull(items) -> "Interval":
        items = list(items)
        if not items:
            raise ValueError("hull of nothing")
        return Interval(min(i.lo for i in items), max(i.hi for i in items))

    # -- predicates -----------------------------------------------------
    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        other = Interval.exact(other)
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Interval.exact(other))

    def __rsub__(self, other):
        return Interval.exact(other) + (-self)

    def __mul__(self, other):
        other = Interval.exact(other)
        prods = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Interval.exact(other)
        if other.contains_zero():
            raise DomainError(f"division by interval containing zero: {other}")
        quots = (self.lo / other.lo, self.lo / other.hi,
                 self.hi / other.lo, self.hi / other.hi)
        return Interval(_down(min(quots)), _up(max(quots)))

    def __rtruediv__(self, other):
        return Interval.exact(other) / self

    def __abs__(self):
        if self.lo >= 0:
            return Interval(self.lo, self.hi)
        if self.hi <= 0:
            return -self
        return Interval(0.0, _up(max(-self.lo, self.hi)))

    def ipow(self, k: int) -> "Interval":
        """Integer power, tight on even exponents straddling zero."""
        if k == 0:
            return Interval(1.0, 1.0)
        if k < 0:
            return Interval(1.0, 1.0) / self.ipow(-k)
        lo_p, hi_p = self.lo ** k, self.hi ** k
        if k % 2 == 1:
            return Interval(_down(lo_p), _up(hi_p))
        if self.lo >= 0:
            return Interval(_down(lo_p), _up(hi_p))
        if self.hi <= 0:
            return Interval(_down(hi_p), _up(lo_p))
        return Interval(0.0, _up(max(lo_p, hi_p)))

    def sqrt(self) -> "Interval":
        if self.hi < 0:
            raise DomainError(f"sqrt of negative interval {self}")
        lo = max(self.lo, 0.0)
        return Interval(_down(math.sqrt(lo)), _up(math.sqrt(self.hi)))

    def intersect(self, other: "Interval"):
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def split(self):
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)


def box_norm2(box) -> Interval:
    """Enclosure of |x|^2 over a box of intervals."""
    acc = Interval(0.0, 0.0)
    for c in box:
        acc = acc + Interval.exact(c).ipow(2)
    return acc


def box_norm(box) -> Interval:
    return box_norm2(box).sqrt()
