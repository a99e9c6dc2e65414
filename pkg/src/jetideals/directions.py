"""Allowed and forbidden directions of jet ideals.

Allowed directions of an ideal are over-approximated by the common zero
set on the sphere of the lowest homogeneous parts of the generators; the
containment is an equality when every generator is homogeneous.  In the
plane that zero set is computed exactly (roots of a univariate
polynomial); in higher dimensions we first try an exact symbolic solve
and otherwise fall back to an interval-certified patch cover.

Forbidden-direction certificates assert sum_l |Q_l(x)| > c|x|^m on a
cone.  Writing x = s*u with u on the sphere and pulling the homogeneous
scaling out of each Q_l reduces this to positivity of a polynomial in
(s, u) on a compact set, which branch-and-bound interval evaluation can
settle.
"""

from __future__ import annotations

import math
from fractions import Fraction

import sympy

from .errors import DomainError
from .geometry import Direction, SpherePatch, sphere_cover
from .ideal import JetIdeal
from .interval import Interval
from .jetring import MORE_THAN_M, Jet

CERTIFIED_FORBIDDEN = "certified_forbidden"
CANDIDATE_ALLOWED = "candidate_allowed"


def jet_to_sympy(p: Jet, syms):
    expr = sympy.Integer(0)
    for alpha, c in p.coeffs.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, a in zip(syms, alpha):
            if a:
                term *= s ** a
        expr += term
    return expr


class ExactDirection:
    """A direction with float coordinates and, when available, exact
    symbolic coordinates (entries are sympy expressions)."""

    __slots__ = ("vec", "sym")

    def __init__(self, vec, sym=None):
        self.vec = tuple(float(c) for c in vec)
        self.sym = tuple(sym) if sym is not None else None

    def as_direction(self) -> Direction:
        return Direction(self.vec, normalize=True)

    def __repr__(self):
        return f"ExactDirection({self.vec})"

    def dist(self, other) -> float:
        ov = other.vec if isinstance(other, ExactDirection) else tuple(other)
        return math.dist(self.vec, ov)


class DirectionSet:
    """Certified description of a closed subset of the sphere.

    Either a finite list of directions (exact=True means the list is
    provably the whole set) or a list of (SpherePatch, status, bound)
    triples where status is certified_forbidden or candidate_allowed.
    """

    __slots__ = ("n", "exact", "directions", "patches")

    def __init__(self, n, exact, directions=None, patches=None):
        if (directions is None) == (patches is None):
            raise ValueError("need exactly one of directions / patches")
        self.n = n
        self.exact = bool(exact)
        self.directions = list(directions) if directions is not None else None
        self.patches = list(patches) if patches is not None else None

    @property
    def is_finite(self) -> bool:
        return self.directions is not None

    def is_empty(self) -> bool:
        if self.is_finite:
            return not self.directions
        return all(status == CERTIFIED_FORBIDDEN for _, status, _ in self.patches)

    def float_directions(self):
        if not self.is_finite:
            raise DomainError("direction set is a patch cover, not a finite list")
        return [d.vec for d in self.directions]

    def candidate_patches(self):
        if self.is_finite:
            raise DomainError("direction set is finite, not a patch cover")
        return [p for p, status, _ in self.patches if status == CANDIDATE_ALLOWED]

    def to_json(self):
        if self.is_finite:
            return {"exact": self.exact,
                    "directions": [list(d.vec) for d in self.directions]}
        return {"exact": self.exact,
                "patches": [{"axis": p.axis, "sign": p.sign,
                             "box": [list(b) for b in p.box],
                             "status": status,
                             "lower_bound": bound}
                            for p, status, bound in self.patches]}

    def __repr__(self):
        if self.is_finite:
            return f"DirectionSet(n={self.n}, exact={self.exact}, {len(self.directions)} directions)"
        cand = len(self.candidate_patches())
        return f"DirectionSet(n={self.n}, patches={len(self.patches)}, candidates={cand})"


def _lowest_parts(I: JetIdeal):
    parts = []
    for g in I.generators:
        if g.is_zero():
            continue
        parts.append(g.lowest_homogeneous_part())
    if not parts:
        raise DomainError("zero ideal has no direction data")
    return parts


def _is_homogeneous(p: Jet) -> bool:
    degs = {sum(a) for a in p.coeffs}
    return len(degs) <= 1


# ---------------------------------------------------------------------------
# Allowed directions.
# ---------------------------------------------------------------------------

def allow_overapprox(I: JetIdeal, budget: int = 8) -> DirectionSet:
    """Common zero set on the sphere of the generators' lowest parts.

    The result contains every allowed direction; the `exact` flag is set
    when all generators are homogeneous, in which case it equals the
    allowed set.
    """
    parts = _lowest_parts(I)
    exact = all(_is_homogeneous(g) for g in I.generators)
    if I.sig.n == 2:
        dirs = _plane_zero_set(parts)
        return DirectionSet(2, exact, directions=dirs)
    dirs = _exact_zero_set(parts, I.sig.n)
    if dirs is not None:
        return DirectionSet(I.sig.n, exact, directions=dirs)
    patches = _patch_zero_cover(parts, I.sig.n, budget)
    return DirectionSet(I.sig.n, False, patches=patches)


def _plane_zero_set(parts):
    """Exact common roots on S^1 via dehomogenization p(1, t)."""
    t = sympy.Symbol("t", real=True)
    x, y = sympy.symbols("x y", real=True)
    polys = [sympy.Poly(jet_to_sympy(p, (x, y)).subs({x: 1, y: t}), t)
             for p in parts]

    dirs = []
    # vertical directions: all parts vanish at (0, 1) (and by homogeneity
    # symmetry at (0, -1))
    if all(jet_to_sympy(p, (x, y)).subs({x: 0, y: 1}) == 0 for p in parts):
        dirs.append(ExactDirection((0.0, 1.0), (sympy.Integer(0), sympy.Integer(1))))
        dirs.append(ExactDirection((0.0, -1.0), (sympy.Integer(0), sympy.Integer(-1))))

    roots = set()
    for r in polys[0].real_roots():
        # substitution into Poly/expr is exact for rational and CRootOf
        # roots, so this zero test carries no numeric tolerance
        if all(sympy.simplify(q.as_expr().subs(t, r)) == 0 for q in polys[1:]):
            roots.add(r)
    for r in sorted(roots, key=lambda v: float(v)):
        norm = sympy.sqrt(1 + r ** 2)
        sym = (1 / norm, r / norm)
        vec = (float(sym[0].evalf(30)), float(sym[1].evalf(30)))
        dirs.append(ExactDirection(vec, sym))
        dirs.append(ExactDirection((-vec[0], -vec[1]), (-sym[0], -sym[1])))
    return dirs


def _exact_zero_set(parts, n, timeout_terms=2000):
    """Try to solve {p_i = 0, |u| = 1} exactly; None if not tractable."""
    syms = sympy.symbols(f"u0:{n}", real=True)
    system = [jet_to_sympy(p, syms) for p in parts]
    system.append(sum(s ** 2 for s in syms) - 1)
    try:
        sols = sympy.solve(system, list(syms), dict=True)
    except Exception:
        return None
    if not isinstance(sols, list):
        return None
    dirs = []
    for sol in sols:
        if set(sol) != set(syms):
            return None  # a free variable: positive-dimensional solution set
        vals = [sympy.simplify(sol[s]) for s in syms]
        if any(v.free_symbols for v in vals):
            return None
        if any(not v.is_real for v in vals):
            continue
        vec = tuple(float(v.evalf(30)) for v in vals)
        dirs.append(ExactDirection(vec, vals))
    # dedupe (solve can repeat roots)
    unique = []
    for d in dirs:
        if all(d.dist(u) > 1e-9 for u in unique):
            unique.append(d)
    return unique


def _patch_zero_cover(parts, n, budget):
    """Patch cover with interval positivity certificates for sum |p_i|."""
    work = [(p, 0) for p in sphere_cover(n, 0)]
    out = []
    while work:
        patch, depth = work.pop()
        enc = patch.direction_enclosure()
        total = Interval(0.0, 0.0)
        for p in parts:
            total = total + abs(p.eval(enc, mode="interval"))
        if total.lo > 0.0:
            out.append((patch, CERTIFIED_FORBIDDEN, total.lo))
        elif depth < budget:
            work.extend((q, depth + 1) for q in patch.subdivide_all())
        else:
            out.append((patch, CANDIDATE_ALLOWED, None))
    return out


def exact_zero_residual(direction: ExactDirection, p: Jet):
    """Substitute an exact direction into a jet; returns a sympy number.

    Used to confirm zero residual in exact arithmetic for reported
    allowed directions.
    """
    if direction.sym is None:
        raise DomainError("direction carries no exact data")
    syms = sympy.symbols(f"u0:{len(direction.sym)}", real=True)
    expr = jet_to_sympy(p, syms)
    return sympy.simplify(expr.subs(dict(zip(syms, direction.sym))))


# ---------------------------------------------------------------------------
# Forbidden-direction certificates.
# ---------------------------------------------------------------------------

class ForbiddenCertificate:
    """Record of an interval-verified bound sum |Q_l(x)| > c|x|^m on the
    cone of opening delta around omega (omega None = whole sphere)."""

    __slots__ = ("jets", "omega", "c", "delta", "r", "bound", "depth")

    def __init__(self, jets, omega, c, delta, r, bound, depth):
        self.jets = tuple(jets)
        self.omega = omega
        self.c = float(c)
        self.delta = float(delta)
        self.r = float(r)
        self.bound = float(bound)
        self.depth = int(depth)

    def to_json(self):
        return {"Q": [str(q) for q in self.jets],
                "omega": list(self.omega.vec) if self.omega else None,
                "c": self.c, "delta": self.delta, "r": self.r,
                "interval_lower_bound": self.bound,
                "max_depth": self.depth}

    def __repr__(self):
        where = f"omega={self.omega.vec}" if self.omega else "whole sphere"
        return f"ForbiddenCertificate({where}, c={self.c}, bound={self.bound})"


def _scaled_jets(jets, m):
    """q_l(s, u) = Q_l(s*u) / s^{k_l} as jets in n+1 variables would be
    overkill; we just record per-monomial (degree - k_l) powers of s."""
    out = []
    for q in jets:
        k = q.order_of_vanishing()
        if k == MORE_THAN_M or k < 1:
            raise DomainError("certificate jets must have order >= 1")
        out.append((q, k))
    return out


def _eval_scaled(scaled, s: Interval, u_box):
    """Interval enclosure of sum_l |Q_l(s u)/s^{k_l}| for s >= 0."""
    total = Interval(0.0, 0.0)
    s_pows = [Interval(1.0, 1.0)]
    for q, k in scaled:
        term = Interval(0.0, 0.0)
        for alpha, c in q.coeffs.items():
            d = sum(alpha) - k
            while len(s_pows) <= d:
                s_pows.append(s_pows[-1] * s)
            mono = Interval.exact(Fraction(c)) * s_pows[d]
            for ui, ai in zip(u_box, alpha):
                if ai:
                    mono = mono * ui.ipow(ai)
            term = term + mono
        total = total + abs(term)
    return total


def _dome_patches(n, omega, delta):
    """Initial patches meeting the dome around omega (all, if omega None)."""
    patches = sphere_cover(n, 0)
    if omega is None:
        return patches
    kept = []
    for p in patches:
        enc = p.direction_enclosure()
        # min distance from the enclosure box to omega underestimates the
        # true distance, so this keeps a superset of dome-meeting patches
        d2 = 0.0
        for iv, w in zip(enc, omega.vec):
            if w < iv.lo:
                d2 += (iv.lo - w) ** 2
            elif w > iv.hi:
                d2 += (w - iv.hi) ** 2
        if math.sqrt(d2) < delta:
            kept.append(p)
    return kept


def _patch_in_dome(patch, omega, delta):
    """True if the whole patch enclosure is certainly inside the dome."""
    if omega is None:
        return True
    enc = patch.direction_enclosure()
    d2 = Interval(0.0, 0.0)
    for iv, w in zip(enc, omega.vec):
        d2 = d2 + (iv - w).ipow(2)
    return d2.hi < delta * delta


def certify_lower_bound(jets, omega, delta, budget, n, target: float = 0.0):
    """Certified lower bound above `target` for sum |Q_l(s u)| / s^m over
    the dome around omega, s in [0, 1]; returns (bound, depth) or
    (None, depth) when some cell cannot be pushed past the target.

    Since each Q_l has order k_l <= m, s^{k_l} >= s^m for s <= 1 and the
    scaled sum dominates; a positive infimum of the scaled sum therefore
    gives the cone inequality for every 0 < |x| < 1.
    """
    m = jets[0].sig.m
    scaled = _scaled_jets(jets, m)
    work = [(p, Interval(0.0, 1.0), 0) for p in _dome_patches(n, omega, delta)]
    best = math.inf
    max_depth = 0
    while work:
        patch, s_iv, depth = work.pop()
        max_depth = max(max_depth, depth)
        u_box = patch.direction_enclosure()
        total = _eval_scaled(scaled, s_iv, u_box)
        if total.lo > target:
            best = min(best, total.lo)
            continue
        if depth >= budget:
            if _patch_contains_omega(patch, omega) or omega is None:
                return None, max_depth
            # a boundary patch poking outside the dome may legitimately
            # touch zero; only give up if it truly lies inside the dome
            if _patch_in_dome(patch, omega, delta):
                return None, max_depth
            continue
        widths = [hi - lo for lo, hi in patch.box] + [s_iv.width]
        if s_iv.width == max(widths):
            a, b = s_iv.split()
            work.append((patch, a, depth + 1))
            work.append((patch, b, depth + 1))
        else:
            p1, p2 = patch.subdivide()
            work.append((p1, s_iv, depth + 1))
            work.append((p2, s_iv, depth + 1))
    if not math.isfinite(best):
        return None, max_depth
    return best, max_depth


def _patch_contains_omega(patch, omega):
    if omega is None:
        return False
    return patch.contains_direction(omega, slack=1e-12)


def forbidden_certificate_search(jets, omega, budget: int = 12,
                                 delta: float = 1.0):
    """Search for a forbidden-direction certificate around omega.

    Returns a ForbiddenCertificate on success and None when the budget
    runs out (inconclusive, not a disproof).  omega=None certifies the
    whole sphere at once.
    """
    jets = list(jets)
    if not jets:
        raise DomainError("need at least one jet")
    n = jets[0].sig.n
    bound, depth = certify_lower_bound(jets, omega, delta, budget, n)
    if bound is None:
        return None
    # report a strict constant slightly below the proven infimum
    c = bound * (1.0 - 2.0 ** -20)
    return ForbiddenCertificate(jets, omega, c, delta, 1.0, bound, depth)


def verify_forbidden_certificate(jets, c, omega=None, delta: float = 1.0,
                                 budget: int = 12):
    """Check a claimed constant: proves sum |Q_l(x)| > c|x|^m on the cone.

    Returns (verdict, bound, depth) with verdict in {"pass",
    "inconclusive"}; interval methods cannot refute the claim.
    """
    jets = list(jets)
    n = jets[0].sig.n
    bound, depth = certify_lower_bound(jets, omega, delta, budget, n, target=c)
    if bound is not None and bound > c:
        return "pass", bound, depth
    return "inconclusive", bound, depth


# ---------------------------------------------------------------------------
# Coordinate-change consistency check.
# ---------------------------------------------------------------------------

def allow_transform_check(I: JetIdeal, matrix, tol: float = 1e-9):
    """Compare allowed directions of the transformed ideal against the
    pushed-forward directions of the original.

    For generators g, the transformed ideal is generated by g(Ax); its
    allowed set should be A^{-1} applied to the original one (normalized).
    Equality is asserted only when the generators are homogeneous;
    otherwise the check downgrades to set containment.
    """
    from .jetring import DiffeoJet

    phi = DiffeoJet.linear(I.sig, matrix)
    J = I.transform(phi)
    left = allow_overapprox(J)
    right = allow_overapprox(I)
    if not (left.is_finite and right.is_finite):
        raise DomainError("transform check needs finite direction sets")

    inv = phi.linear_inverse().linear_matrix()
    expected = []
    for d in right.directions:
        w = [sum(float(inv[i][j]) * d.vec[j] for j in range(I.sig.n))
             for i in range(I.sig.n)]
        norm = math.sqrt(sum(c * c for c in w))
        expected.append(tuple(c / norm for c in w))

    def subset(av, bv):
        return all(any(math.dist(a, b) <= tol for b in bv) for a in av)

    got = [d.vec for d in left.directions]
    homogeneous = all(_is_homogeneous(g) for g in I.generators)
    if homogeneous:
        ok = subset(got, expected) and subset(expected, got)
        relation = "equal"
    else:
        ok = subset(got, expected)
        relation = "subset"
    return {"ok": ok, "relation": relation,
            "transformed": got, "expected": expected}
