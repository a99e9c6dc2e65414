"""Certificate verification: flat/tame bounds, negligibility, strong
(directional) implication, and the annulus-scale conditions C / C* / C**.

Verdicts are three-valued: "pass", "fail" (a concrete witness point
violates a bound), or "inconclusive" (budget exhausted).  Interval
methods are one-sided, so absence of a certificate is never treated as a
disproof.  Aggregation is the meet fail < inconclusive < pass.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import sympy

from .directions import (allow_overapprox, forbidden_certificate_search,
                         jet_to_sympy)
from .errors import DomainError
from .geometry import Annulus, Cone, Direction, dome_membership, sphere_cover
from .ideal import JetIdeal
from .interval import Interval
from .jetring import Jet, monomials
from .symfun import (Const, Cutoff, GaugeRef, Norm, ScalarExpr, ZERO, add,
                     div, expr_derive, expr_eval, expr_str, hom_degree, ipow,
                     mul, DEFAULT_CUTOFF, Coord)

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
_ORDER = {FAIL: 0, INCONCLUSIVE: 1, PASS: 2}


def meet(*verdicts) -> str:
    """Order-independent aggregation: fail < inconclusive < pass."""
    return min(verdicts, key=_ORDER.__getitem__, default=PASS)


def multi_indices(m, n):
    """All multi-indices of order <= m (reuses the monomial table)."""
    return monomials(m, n)


def _try_eval(e, x):
    try:
        return expr_eval(e, x)
    except DomainError:
        return None


# ---------------------------------------------------------------------------
# Sampling helpers.
# ---------------------------------------------------------------------------

def _random_unit(rng, n):
    while True:
        v = rng.standard_normal(n)
        norm = float(np.linalg.norm(v))
        if norm > 1e-9:
            return tuple(float(c) / norm for c in v)


def _transverse_unit(rng, n, omega):
    """Random unit vector orthogonal to omega."""
    while True:
        v = rng.standard_normal(n)
        v = v - np.dot(v, omega) * np.asarray(omega)
        norm = float(np.linalg.norm(v))
        if norm > 1e-9:
            return tuple(float(c) / norm for c in v)


def _dome_directions(rng, omegas, delta, count):
    """Directions inside the dome around a finite Omega (centers included)."""
    dirs = [tuple(w) for w in omegas]
    per = max(1, count // max(1, len(omegas)))
    for w in omegas:
        for _ in range(per):
            t = float(rng.uniform(0, delta * 0.98))
            u = np.asarray(w) + t * np.asarray(_transverse_unit(rng, len(w), w))
            u = u / np.linalg.norm(u)
            u = tuple(float(c) for c in u)
            if dome_membership(u, omegas, delta):
                dirs.append(u)
    return dirs


def _cutoff_feature_scales(exprs):
    """Absolute argument breakpoints of every cutoff node in the trees."""
    scales = []

    def walk(e):
        if isinstance(e, Cutoff):
            scales.append((float(e.scale * e.spec.a), float(e.scale * e.spec.b)))
            walk(e.arg)
        elif hasattr(e, "terms"):
            for t in e.terms:
                walk(t)
        elif hasattr(e, "factors"):
            for f in e.factors:
                walk(f)
        elif hasattr(e, "base"):
            walk(e.base)
        elif hasattr(e, "num"):
            walk(e.num)
            walk(e.den)
        elif isinstance(e, GaugeRef):
            walk(e.arg)

    for e in exprs:
        walk(e)
    return scales


def _unit_annulus_samples(n, K, omegas, rel_scales, rng, n_random=40,
                          n_radii=9):
    """Deterministic sample set on Ann_K(1), enriched with whisker points
    around each direction of Omega at the given relative transverse
    scales (cutoff breakpoints divided by the working radius)."""
    radii = [float(K ** t) for t in np.linspace(-0.95, 0.95, n_radii)]
    points = []
    for _ in range(n_random):
        u = _random_unit(rng, n)
        for s in radii:
            points.append(tuple(s * c for c in u))
    omegas = [tuple(w) for w in (omegas or [])]
    t_values = set()
    for lo, hi in rel_scales:
        for f in (0.25, 0.5, 0.95, 1.0):
            t_values.add(lo * f)
        t_values.add(0.5 * (lo + hi))
        for f in (0.95, 1.0, 1.5, 4.0):
            t_values.add(hi * f)
    t_values.add(1e-6)
    for w in omegas:
        for t in sorted(t_values):
            for _ in range(3):
                wt = _transverse_unit(rng, n, w)
                for s in radii:
                    x = tuple(s * wc + t * tc for wc, tc in zip(w, wt))
                    norm = math.sqrt(sum(c * c for c in x))
                    if 1.0 / K < norm < K:
                        points.append(x)
    return points


# ---------------------------------------------------------------------------
# Flatness and tameness shell sweeps.
# ---------------------------------------------------------------------------

class ShellReport:
    """Measured shell-sup table for a flat or tame check."""

    def __init__(self, kind, expr, region, m, shells, verdict, constant=None,
                 witness=None, notes=()):
        self.kind = kind
        self.expr = expr
        self.region = region
        self.m = m
        self.shells = shells          # list of (k, measured sup)
        self.verdict = verdict
        self.constant = constant      # tame: measured uniform bound
        self.witness = witness
        self.notes = list(notes)

    def to_json(self):
        return {"kind": self.kind, "expr": expr_str(self.expr),
                "m": self.m,
                "shells": [[k, v] for k, v in self.shells],
                "verdict": self.verdict, "constant": self.constant,
                "witness": self.witness, "notes": self.notes}


def _region_directions(region, n, rng, count=40):
    if isinstance(region, Cone):
        omegas = [tuple(w) for w in region.omega_set]
        return _dome_directions(rng, omegas, region.delta, count)
    return [_random_unit(rng, n) for _ in range(count)]


def _shell_sweep(expr, region, m, n, seed, k_lo, k_hi, weight):
    """Per-shell measured sup of |d^alpha e(x)| * weight(alpha, |x|)."""
    rng = np.random.default_rng(seed)
    derivs = [(alpha, expr_derive(expr, alpha))
              for alpha in multi_indices(m, n)]
    dirs = _region_directions(region, n, rng)
    shells = []
    witness_pool = []
    for k in range(k_lo, k_hi + 1):
        top = 0.0
        top_point = None
        for frac in (0.55, 0.75, 1.0):
            s = frac * 2.0 ** -k
            for u in dirs:
                x = tuple(s * c for c in u)
                for alpha, d_expr in derivs:
                    if d_expr == ZERO:
                        continue
                    val = _try_eval(d_expr, x)
                    if val is None:
                        continue
                    ratio = abs(val) * weight(alpha, s)
                    if ratio > top:
                        top = ratio
                        top_point = (alpha, x, abs(val))
        shells.append((k, top))
        witness_pool.append(top_point)
    return shells, witness_pool


def check_flat(F: ScalarExpr, region, m: int, n: int, seed: int = 0,
               k_range=(4, 24)) -> ShellReport:
    """Shell test of d^alpha F = o(|x|^(m-|alpha|)).

    pass: shell sups strictly decrease over the last 8 shells and the
    final value is below 1e-3 of the first; fail: clear growth; anything
    else is inconclusive.  The finite-trend contract replaces the limit.
    """
    shells, _ = _shell_sweep(F, region, m, n, seed, *k_range,
                             weight=lambda a, s: s ** (sum(a) - m))
    vals = [v for _, v in shells]
    notes = ["pass = strictly decreasing over last 8 shells and "
             "final < 1e-3 * first"]
    if max(vals) == 0.0:
        return ShellReport("flat", F, region, m, shells, PASS, notes=notes)
    tail = vals[-8:]
    decreasing = all(a > b for a, b in zip(tail, tail[1:]))
    small = vals[-1] < 1e-3 * vals[0] if vals[0] > 0 else True
    if decreasing and small:
        verdict = PASS
    elif vals[-1] > 10.0 * vals[0] and all(a <= b for a, b in zip(tail, tail[1:])):
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    return ShellReport("flat", F, region, m, shells, verdict, notes=notes)


def check_tame(S: ScalarExpr, region, m: int, n: int, seed: int = 0,
               bound=None, k_range=(4, 24)) -> ShellReport:
    """Shell test of d^alpha S = O(|x|^(-|alpha|)).

    pass: the measured shell sups stay uniformly bounded (no growth
    between the first and last 8 shells) and, when a constant is
    supplied, below it; a sampled point above the supplied constant is a
    genuine witness and fails.
    """
    shells, pool = _shell_sweep(S, region, m, n, seed, *k_range,
                                weight=lambda a, s: s ** sum(a))
    vals = [v for _, v in shells]
    measured = max(vals)
    witness = None
    if bound is not None and measured > bound:
        idx = vals.index(measured)
        alpha, x, raw = pool[idx]
        witness = {"alpha": list(alpha), "point": list(x), "value": raw,
                   "claimed_bound": bound}
        return ShellReport("tame", S, region, m, shells, FAIL,
                           constant=measured, witness=witness)
    head = max(vals[:8]) if any(vals[:8]) else 0.0
    tail = max(vals[-8:])
    if head == 0.0:
        verdict = PASS if tail == 0.0 else FAIL
    elif tail <= 2.0 * head:
        verdict = PASS
    elif tail > 8.0 * head:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    return ShellReport("tame", S, region, m, shells, verdict,
                       constant=measured)


def check_flat_tame_product(F: ScalarExpr, S: ScalarExpr, region, m: int,
                            n: int, seed: int = 0):
    """The product of a tame factor and a flat factor is flat again;
    checks the product directly and cross-checks with a Leibniz bound."""
    tame = check_tame(S, region, m, n, seed=seed)
    if tame.verdict == FAIL:
        raise DomainError("tame factor fails its own check")
    flat = check_flat(F, region, m, n, seed=seed)
    if flat.verdict == FAIL:
        raise DomainError("flat factor fails its own check")
    product = check_flat(mul(S, F), region, m, n, seed=seed)
    # Leibniz: shell sup of the product is at most 2^m * A_S * flat sup
    leibniz_ok = all(pv <= 2.0 ** m * (tame.constant or 0.0) * fv + 1e-12
                     for (_, pv), (_, fv) in zip(product.shells, flat.shells))
    return {"verdict": product.verdict,
            "product_report": product.to_json(),
            "tame_report": tame.to_json(),
            "flat_report": flat.to_json(),
            "leibniz_bound_ok": leibniz_ok}


# ---------------------------------------------------------------------------
# Negligibility.
# ---------------------------------------------------------------------------

def _cell_outside_dome(patch, omegas, delta) -> bool:
    """True when the patch enclosure certainly misses every delta-ball.

    The box minimum distance underestimates the distance of any true
    direction of the patch, so a discard here is sound."""
    enc = patch.direction_enclosure()
    for w in omegas:
        d2 = 0.0
        for iv, wc in zip(enc, w):
            if wc < iv.lo:
                d2 += (iv.lo - wc) ** 2
            elif wc > iv.hi:
                d2 += (wc - iv.hi) ** 2
        if math.sqrt(d2) < delta:
            return False
    return True


def _dome_cells(n, omegas, delta, init_depth=2):
    """Sphere patches that may intersect the union of delta-balls around
    the finite direction set; a superset, which is the sound side."""
    return [p for p in sphere_cover(n, init_depth)
            if not _cell_outside_dome(p, omegas, delta)]


def _dome_sup(expr, n, omegas, delta, target=None, budget=64):
    """Certified upper bound of |expr| on the dome, by interval
    subdivision of sphere patches (cells provably outside the dome are
    dropped as subdivision proceeds, so tiny domes stay cheap).

    With a target: returns (sup_bound, True) if every cell is pushed
    below the target, else (best_bound, False).  Without a target:
    refines a few levels past the dome scale and returns the sup bound.
    """
    work = [(p, 0) for p in _dome_cells(n, omegas, delta)]
    # without a target, stop once cells are comparable to the dome size
    free_depth = max(3, min(60, int(-math.log2(max(delta, 1e-18))) + 3))
    top = 0.0
    certified = True
    while work:
        patch, depth = work.pop()
        if depth and _cell_outside_dome(patch, omegas, delta):
            continue
        enc = patch.direction_enclosure()
        try:
            val = abs(expr_eval(expr, enc, mode="interval"))
        except DomainError:
            if depth < budget:
                work.extend((q, depth + 1) for q in patch.subdivide_all())
                continue
            return math.inf, False
        if target is not None and val.hi > target:
            if depth < budget:
                work.extend((q, depth + 1) for q in patch.subdivide_all())
                continue
            certified = False
            top = max(top, val.hi)
            continue
        if target is None and depth < free_depth and val.width > 0.01:
            work.extend((q, depth + 1) for q in patch.subdivide_all())
            continue
        top = max(top, val.hi)
    return top, certified


class NegligibilityCertificate:
    """Per-epsilon records for the cone bound (a) and the Taylor
    condition (b), plus the aggregated verdict."""

    def __init__(self, F, omegas, m, records, verdict):
        self.F = F
        self.omegas = omegas
        self.m = m
        self.records = records
        self.verdict = verdict

    def to_json(self):
        return {"F": expr_str(self.F),
                "omegas": [list(w) for w in self.omegas],
                "m": self.m, "records": self.records,
                "verdict": self.verdict}


def delta_ladder(eps):
    """Search ladder for the cone opening; the analytically valid choices
    in the sources can be far below float resolution, so concrete
    certifiable substitutes are tried from large to small."""
    cands = [eps / 20, eps / 40, eps ** 2 / 20, eps ** 2 / 40, eps ** 3 / 20]
    return [d for d in cands if 0.0 < d < 0.25]


def check_negligible(F: ScalarExpr, omegas, m: int, n: int,
                     eps_grid=(1.0, 0.1, 0.01, 0.001), budget: int = 64,
                     seed: int = 0, pair_samples: int = 100_000):
    """Check that F is negligible for the direction set Omega.

    Condition (a) asks |d^alpha F(x)| <= eps |x|^(m-|alpha|) on a cone
    Gamma(Omega, delta, r) for every |alpha| <= m.  When the derivative
    is homogeneous of degree d >= m - |alpha| (read off the expression
    tree), the cone bound reduces to a dome bound at |x| = 1, with the
    excess homogeneity absorbed into the radius r.  Condition (b), the
    Taylor-compatibility bound, follows from (a) by convexity for
    single-direction domes with delta < 1/4 and is otherwise checked on
    random point pairs.
    """
    omegas = [tuple(float(c) for c in w) for w in omegas]
    if not omegas:
        return NegligibilityCertificate(F, omegas, m, [
            {"vacuous": True, "verdict": PASS,
             "note": "empty direction set: every C^m function qualifies"}],
            PASS)

    rng = np.random.default_rng(seed)
    derivs = [(alpha, expr_derive(F, alpha)) for alpha in multi_indices(m, n)]
    records = []
    verdicts = []
    for eps in eps_grid:
        rec = {"eps": eps}
        # genuine-failure scan on the center rays: for derivatives whose
        # tree is homogeneous of degree exactly m - |alpha| the ratio is
        # scale-invariant, so one bad value on a ray through Omega
        # refutes every (delta, r)
        witness = None
        for alpha, d_expr in derivs:
            if d_expr == ZERO:
                continue
            d = hom_degree(d_expr)
            if d is None or d != m - sum(alpha):
                continue
            for w in omegas:
                x = tuple(0.5 * c for c in w)
                val = _try_eval(d_expr, x)
                if val is None:
                    continue
                if abs(val) > eps * 0.5 ** (m - sum(alpha)) * (1 + 1e-12):
                    witness = {"alpha": list(alpha), "point": list(x),
                               "value": abs(val),
                               "bound": eps * 0.5 ** (m - sum(alpha))}
                    break
            if witness:
                break
        if witness:
            rec.update({"verdict": FAIL, "witness": witness})
            records.append(rec)
            verdicts.append(FAIL)
            continue

        found = None
        for delta in delta_ladder(eps):
            alpha_records, ok, r_cap = [], True, 1.0
            for alpha, d_expr in derivs:
                a_rec = {"alpha": list(alpha)}
                if d_expr == ZERO:
                    a_rec["status"] = "zero"
                    alpha_records.append(a_rec)
                    continue
                d = hom_degree(d_expr)
                gap = None if d is None else d - (m - sum(alpha))
                if gap is None or gap < 0:
                    a_rec["status"] = "no homogeneity reduction"
                    ok = False
                    alpha_records.append(a_rec)
                    break
                if gap == 0:
                    sup, certified = _dome_sup(d_expr, n, omegas, delta,
                                               target=eps, budget=budget)
                    a_rec.update({"status": "dome bound",
                                  "dome_sup_upper": sup,
                                  "certified": certified})
                    if not certified:
                        ok = False
                        alpha_records.append(a_rec)
                        break
                else:
                    sup, _ = _dome_sup(d_expr, n, omegas, delta, target=None,
                                       budget=budget)
                    if not math.isfinite(sup):
                        ok = False
                        a_rec["status"] = "unbounded enclosure"
                        alpha_records.append(a_rec)
                        break
                    if sup > eps:
                        r_cap = min(r_cap, (eps / sup) ** (1.0 / gap))
                    a_rec.update({"status": "radius absorbed",
                                  "dome_sup_upper": sup,
                                  "homogeneity_gap": gap})
                alpha_records.append(a_rec)
            if ok:
                found = (delta, r_cap, alpha_records)
                break
        if found is None:
            rec.update({"verdict": INCONCLUSIVE,
                        "note": "delta ladder exhausted"})
            records.append(rec)
            verdicts.append(INCONCLUSIVE)
            continue

        delta, r_found, alpha_records = found
        cond_b = _condition_b(F, derivs, omegas, delta, r_found, eps, m, n,
                              rng, pair_samples)
        rec.update({"delta": delta, "r": r_found,
                    "condition_a": alpha_records, "condition_b": cond_b,
                    "verdict": meet(PASS, cond_b["verdict"])})
        records.append(rec)
        verdicts.append(rec["verdict"])
    return NegligibilityCertificate(F, omegas, m, records, meet(*verdicts))


def _condition_b(F, derivs, omegas, delta, r, eps, m, n, rng, pair_samples):
    """Taylor-compatibility condition between pairs of cone points."""
    separated = all(math.dist(a, b) > 2 * delta
                    for i, a in enumerate(omegas) for b in omegas[:i])
    if delta < 0.25 and separated:
        return {"method": "convexity",
                "note": "single-direction dome components are convex; "
                        "Taylor's theorem turns the (a) bounds into (b)",
                "verdict": PASS}
    deriv_map = dict(derivs)
    checked = 0
    for _ in range(pair_samples):
        w = omegas[rng.integers(len(omegas))]
        pts = []
        for _ in range(2):
            u = np.asarray(w) + float(rng.uniform(0, delta * 0.98)) * \
                np.asarray(_transverse_unit(rng, n, w))
            u = u / np.linalg.norm(u)
            s = float(rng.uniform(0.05, 0.98)) * r
            pts.append(tuple(s * float(c) for c in u))
        x, y = pts
        ok = True
        for alpha in multi_indices(m, n):
            ax = _try_eval(deriv_map[alpha], x)
            if ax is None:
                ok = False
                break
            taylor = 0.0
            rem = m - sum(alpha)
            for beta in multi_indices(rem, n):
                ab = tuple(a + b for a, b in zip(alpha, beta))
                coeff = _try_eval(deriv_map[ab], y)
                if coeff is None:
                    ok = False
                    break
                term = coeff
                for xi, yi, bi in zip(x, y, beta):
                    term *= (xi - yi) ** bi
                term /= math.prod(math.factorial(b) for b in beta)
                taylor += term
            if not ok:
                break
            gap = abs(ax - taylor)
            allowed = eps * math.dist(x, y) ** rem
            if gap > allowed * (1 + 1e-9) + 1e-15:
                return {"method": "two-point sampling",
                        "verdict": FAIL,
                        "witness": {"x": list(x), "y": list(y),
                                    "alpha": list(alpha),
                                    "gap": gap, "allowed": allowed}}
        if ok:
            checked += 1
    return {"method": "two-point sampling", "pairs": checked,
            "verdict": PASS}


# ---------------------------------------------------------------------------
# Symbolic identity residuals.
# ---------------------------------------------------------------------------

def expr_to_sympy(e: ScalarExpr, syms, plateau_cutoffs=True):
    """ScalarExpr -> sympy, with cutoff nodes replaced by their plateau
    value (1 for the cutoff, 0 for its derivatives).  The caller is
    responsible for having certified the plateau restriction."""
    if isinstance(e, Const):
        return sympy.Rational(e.value.numerator, e.value.denominator)
    if isinstance(e, Coord):
        return syms[e.i]
    if hasattr(e, "terms"):
        return sympy.Add(*(expr_to_sympy(t, syms, plateau_cutoffs)
                           for t in e.terms))
    if hasattr(e, "factors"):
        return sympy.Mul(*(expr_to_sympy(f, syms, plateau_cutoffs)
                           for f in e.factors))
    if hasattr(e, "base"):
        return expr_to_sympy(e.base, syms, plateau_cutoffs) ** e.k
    if hasattr(e, "num"):
        return (expr_to_sympy(e.num, syms, plateau_cutoffs)
                / expr_to_sympy(e.den, syms, plateau_cutoffs))
    if isinstance(e, Norm):
        return sympy.sqrt(sympy.Add(*(syms[i] ** 2 for i in e.indices)))
    if isinstance(e, Cutoff):
        if not plateau_cutoffs:
            raise DomainError("cutoff node outside plateau-restricted mode")
        return sympy.Integer(1 if e.order == 0 else 0)
    raise DomainError(f"node {type(e).__name__} has no symbolic form")


def _collect_cutoffs(exprs):
    out = []

    def walk(e):
        if isinstance(e, Cutoff):
            out.append(e)
            walk(e.arg)
        elif hasattr(e, "terms"):
            for t in e.terms:
                walk(t)
        elif hasattr(e, "factors"):
            for f in e.factors:
                walk(f)
        elif hasattr(e, "base"):
            walk(e.base)
        elif hasattr(e, "num"):
            walk(e.num)
            walk(e.den)
        elif isinstance(e, GaugeRef):
            walk(e.arg)

    for e in exprs:
        walk(e)
    return out


def _region_boxes(omegas, delta, s_lo, s_hi, n):
    """Interval boxes enclosing {s*u : s in [s_lo, s_hi], |u - w| < delta}."""
    boxes = []
    s_iv = Interval(s_lo, s_hi)
    for w in omegas:
        box = []
        for c in w:
            u_iv = Interval(c - delta, c + delta)
            box.append(s_iv * u_iv)
        boxes.append(box)
    return boxes


def _plateaus_certified(exprs, boxes, s_range=None, n=None):
    """True if every cutoff argument stays within its plateau over every
    region box (so the symbolic plateau substitution is valid).

    When the cutoff argument is the full-vector norm (or its constant
    reciprocal) and the radial range of the region is known, that range
    is used directly: a box enclosure of |x| is always slightly wider
    than the true one and would spuriously fail a plateau that the
    region touches only at its boundary.
    """
    full = tuple(range(n)) if n is not None else None
    for cut in _collect_cutoffs(exprs):
        top = float(cut.spec.a * cut.scale)
        arg = cut.arg
        if s_range is not None and isinstance(arg, Norm) and arg.indices == full:
            if s_range[1] > top:
                return False
            continue
        if (s_range is not None and hasattr(arg, "num")
                and isinstance(arg.num, Const) and arg.num.value > 0
                and isinstance(arg.den, Norm) and arg.den.indices == full):
            if float(arg.num.value) / s_range[0] > top:
                return False
            continue
        for box in boxes:
            try:
                enc = expr_eval(arg, box, mode="interval")
            except DomainError:
                return False
            if enc.hi > top:
                return False
    return True


def symbolic_residual_zero(p: Jet, terms, F: ScalarExpr) -> bool:
    """Exact check that p - sum S_l Q_l - F vanishes as a rational
    expression, with cutoffs restricted to their plateau."""
    n = p.sig.n
    syms = sympy.symbols(f"x0:{n}", real=True, positive=False)
    residual = jet_to_sympy(p, syms)
    for Q, S, _ in terms:
        residual -= expr_to_sympy(S, syms) * jet_to_sympy(Q, syms)
    residual -= expr_to_sympy(F, syms)
    return sympy.simplify(sympy.together(residual)) == 0


# ---------------------------------------------------------------------------
# Strong (directional) implication.
# ---------------------------------------------------------------------------

class ImplicationCertificate:
    """A claimed decomposition p = sum S_l Q_l + F with tameness
    constants, a direction scope, and optional annulus-scale data."""

    def __init__(self, ideal: JetIdeal, target: Jet, terms, F: ScalarExpr,
                 scope="global", annulus=None):
        self.ideal = ideal
        self.target = target
        self.terms = [(Q, S, float(C)) for Q, S, C in terms]
        self.F = F
        self.scope = scope
        self.annulus = annulus

    def to_json(self):
        return {
            "ideal": {"m": self.ideal.sig.m, "n": self.ideal.sig.n,
                      "generators": [str(g) for g in self.ideal.generators]},
            "target": str(self.target),
            "terms": [{"Q": str(Q), "S": expr_str(S), "C": C}
                      for Q, S, C in self.terms],
            "F": expr_str(self.F),
            "scope": self.scope if self.scope == "global"
            else [list(w) for w in self.scope],
            **({"annulus": self.annulus} if self.annulus else {}),
        }


def check_strong_directional(cert: ImplicationCertificate, omega: Direction,
                             delta_omega: float = 0.5,
                             eps_grid=(1.0, 0.1, 0.01, 0.001),
                             budget: int = 64, seed: int = 0) -> dict:
    """Verify strong implication in one direction.

    For a forbidden direction the decomposition F = p, S = 0 always
    works, so a forbidden-direction certificate alone yields a pass.
    For an allowed direction all three conditions are checked: F
    negligible near omega, each S_l tame below its stated constant, and
    the identity exactly zero symbolically.
    """
    I, p = cert.ideal, cert.target
    m, n = I.sig.m, I.sig.n
    report = {"omega": list(omega.vec)}
    for Q, _, _ in cert.terms:
        if not I.contains(Q):
            raise DomainError(f"certificate jet {Q} is not in the ideal")

    allowed = allow_overapprox(I)
    is_allowed = None
    if allowed.is_finite:
        is_allowed = any(math.dist(omega.vec, d.vec) <= 1e-9
                         for d in allowed.directions)
    if is_allowed is False and allowed.exact:
        fc = forbidden_certificate_search(
            I.basis_jets() or list(I.generators), omega, budget=12)
        if fc is not None:
            report.update({
                "verdict": PASS, "trivial": True,
                "note": "forbidden direction: F = p, S = 0 always works",
                "forbidden_certificate": fc.to_json()})
            return report

    # directions of Allow(I) near omega; the negligibility scope
    if allowed.is_finite:
        local = [d.vec for d in allowed.directions
                 if math.dist(d.vec, omega.vec) < delta_omega]
    else:
        local = [tuple(omega.vec)]
    if not local:
        local = [tuple(omega.vec)]

    neg = check_negligible(cert.F, local, m, n, eps_grid=eps_grid,
                           budget=budget, seed=seed)
    report["negligibility"] = neg.to_json()

    tame_reports = []
    cone = Cone([Direction(w, normalize=True) for w in local],
                delta_omega, 1.0)
    for idx, (Q, S, C) in enumerate(cert.terms):
        tr = check_tame(S, cone, m, n, seed=seed + idx, bound=C)
        tame_reports.append(tr.to_json())
    report["tameness"] = tame_reports

    residual_ok = symbolic_residual_zero(p, cert.terms, cert.F)
    report["identity_residual_zero"] = residual_ok

    verdict = meet(neg.verdict,
                   *(t["verdict"] for t in tame_reports),
                   PASS if residual_ok else FAIL)
    report["verdict"] = verdict
    return report


def check_strong_global(cert: ImplicationCertificate,
                        delta_omega: float = 0.5,
                        eps_grid=(1.0, 0.1, 0.01, 0.001),
                        budget: int = 64, seed: int = 0) -> dict:
    """Verify strong implication over every allowed direction.

    An empty allowed set passes vacuously.  Otherwise the certificate's
    scope must cover every allowed direction; a per-direction check runs
    for each, and the conclusions (membership in the closure, closedness
    of the ideal) are recorded from the verified facts.
    """
    I, p = cert.ideal, cert.target
    allowed = allow_overapprox(I)
    report = {"target": str(p)}
    if allowed.is_finite and not allowed.directions:
        report.update({
            "verdict": PASS, "vacuous": True,
            "note": "no allowed directions: every jet is implied and the "
                    "closure is the whole maximal ideal"})
        return report
    if not allowed.is_finite:
        report.update({"verdict": INCONCLUSIVE,
                       "note": "allowed set not resolved to a finite list"})
        return report

    if cert.scope == "global":
        scope = [d.vec for d in allowed.directions]
    else:
        scope = [tuple(float(c) for c in w) for w in cert.scope]
        for d in allowed.directions:
            if not any(math.dist(d.vec, w) <= 1e-9 for w in scope):
                raise DomainError(
                    f"uncovered allowed direction {d.vec}")

    sub = []
    for w in scope:
        sub.append(check_strong_directional(
            cert, Direction(w, normalize=True), delta_omega=delta_omega,
            eps_grid=eps_grid, budget=budget, seed=seed))
    report["directions"] = sub
    verdict = meet(*(r["verdict"] for r in sub))
    report["verdict"] = verdict
    if verdict == PASS:
        conclusions = ["target is implied by the ideal: p lies in cl(I)"]
        if not I.contains(p):
            conclusions.append("p is not in I itself, so I is not closed")
        report["conclusions"] = conclusions
    return report


# ---------------------------------------------------------------------------
# Annulus-scale conditions C / C* / C**.
# ---------------------------------------------------------------------------

def expr_scale_coords(e: ScalarExpr, rho) -> ScalarExpr:
    """e(rho * x) as an expression (rho an exact positive Fraction)."""
    rho = Fraction(rho)
    if rho <= 0:
        raise ValueError("need rho > 0")
    if isinstance(e, Const):
        return e
    if isinstance(e, Coord):
        return mul(Const(rho), e)
    if hasattr(e, "terms"):
        return add(*(expr_scale_coords(t, rho) for t in e.terms))
    if hasattr(e, "factors"):
        return mul(*(expr_scale_coords(f, rho) for f in e.factors))
    if hasattr(e, "base"):
        return ipow(expr_scale_coords(e.base, rho), e.k)
    if hasattr(e, "num"):
        return div(expr_scale_coords(e.num, rho),
                   expr_scale_coords(e.den, rho))
    if isinstance(e, Norm):
        return mul(Const(rho), e)
    if isinstance(e, Cutoff):
        return Cutoff(e.spec, expr_scale_coords(e.arg, rho), e.scale, e.order)
    raise DomainError(f"cannot rescale node {type(e).__name__}")


def jet_to_sympy_scaled(p: Jet, syms, rho) -> sympy.Expr:
    rho = sympy.Rational(Fraction(rho))
    expr = sympy.Integer(0)
    for alpha, c in p.coeffs.items():
        term = sympy.Rational(c.numerator, c.denominator) * rho ** sum(alpha)
        for s, a in zip(syms, alpha):
            if a:
                term *= s ** a
        expr += term
    return expr


def chi_expr(n: int) -> ScalarExpr:
    """Radial bump: 1 on 1/2 < |x| < 2, 0 outside 1/4 < |x| < 4."""
    full = Norm(range(n))
    outer = Cutoff(DEFAULT_CUTOFF, full, Fraction(1, 2))
    inner = Cutoff(DEFAULT_CUTOFF, div(Const(1), full), Fraction(1, 2))
    return mul(outer, inner)


def measure_chi_constant(m: int, n: int, seed: int = 0) -> float:
    """C_hat = 2^m * max(1, measured C^m norm of the chi bump)."""
    chi = chi_expr(n)
    rng = np.random.default_rng(seed)
    top = 1.0
    for alpha in multi_indices(m, n):
        d = expr_derive(chi, alpha)
        for s in np.geomspace(0.26, 3.9, 40):
            for _ in range(20):
                u = _random_unit(rng, n)
                val = _try_eval(d, tuple(float(s) * c for c in u))
                if val is not None:
                    top = max(top, abs(val))
    return 2.0 ** m * top


def _sampled_bound_check(named_exprs, points, m, n, bound_fn):
    """Measure sup |d^alpha G| / bound(name, alpha) over the samples.

    A sampled value above its bound is a true function value, hence a
    genuine witness: verdict fail.  Otherwise pass with the measured
    margins (sampling cannot disprove the sup, so the bounds themselves
    are reported for scrutiny).
    """
    results = []
    verdict = PASS
    for name, G in named_exprs:
        worst = 0.0
        witness = None
        for alpha in multi_indices(m, n):
            d = expr_derive(G, alpha)
            if d == ZERO:
                continue
            limit = bound_fn(name, alpha)
            for x in points:
                val = _try_eval(d, x)
                if val is None:
                    continue
                ratio = abs(val) / limit
                if ratio > worst:
                    worst = ratio
                    if ratio > 1.0 + 1e-9:
                        witness = {"alpha": list(alpha), "point": list(x),
                                   "value": abs(val), "bound": limit}
        results.append({"name": name, "max_ratio": worst,
                        "witness": witness})
        if witness is not None:
            verdict = FAIL
    return verdict, results


def check_annulus_condition(variant: str, params: dict, p: Jet, Q_list,
                            F: ScalarExpr, S_list, omegas, seed: int = 0,
                            chi_constant=None) -> dict:
    """Verify one of the three annulus-scale formulations.

    variant "C":  |d^a F| <= eps rho^(m-|a|) and |d^a S_l| <= A rho^(-|a|)
                  on Ann_4(rho); identity p = F + sum S_l Q_l on
                  Ann_2(rho) near Omega.
    variant "C*": the rescaled functions Ftilde = eps^-1 rho^-m F(rho x),
                  Stilde_l = A^-1 S_l(rho x) obey |d^a| <= 1 on
                  1/4 < |x| < 4; identity p(rho x) = eps rho^m Ftilde +
                  sum A Stilde_l Q_l(rho x) on 1/2 < |x| < 2 near Omega.
    variant "C**": F* = chi Ftilde, S*_l = A chi Stilde_l obey global
                  bounds <= A_target; same identity (chi = 1 there).

    Bounds are checked on a deterministic cutoff-aware sample set (a
    violation is a genuine witness); the identity is certified exactly:
    interval arithmetic confirms every cutoff sits on its plateau over
    the region, then the plateau-substituted residual is simplified to
    zero symbolically.
    """
    m, n = p.sig.m, p.sig.n
    A = float(params["A"])
    eps = float(params["eps"])
    delta = float(params["delta"])
    r = float(params["r"])
    rho = float(params["rho"])
    if not 0 < rho <= r:
        raise DomainError("need 0 < rho <= r")
    omegas = [tuple(float(c) for c in w) for w in omegas]
    rng = np.random.default_rng(seed)

    rho_frac = Fraction(rho)
    scales = _cutoff_feature_scales([F] + list(S_list))
    rel_scales = [(lo / rho, hi / rho) for lo, hi in scales]
    unit_pts = _unit_annulus_samples(n, 4.0, omegas, rel_scales, rng)

    report = {"variant": variant, "params": dict(params)}

    if variant == "C":
        pts = [tuple(rho * c for c in x) for x in unit_pts]
        named = [("F", F)] + [(f"S{i+1}", S) for i, S in enumerate(S_list)]

        def bound(name, alpha):
            if name == "F":
                return eps * rho ** (m - sum(alpha))
            return A * rho ** (-sum(alpha))

        verdict_b, rows = _sampled_bound_check(named, pts, m, n, bound)
        boxes = _region_boxes(omegas, delta, rho / 2, 2 * rho, n)
        id_exprs = [F] + list(S_list)
        plateau = _plateaus_certified(id_exprs, boxes,
                                      s_range=(rho / 2, 2 * rho), n=n)
        if plateau:
            syms = sympy.symbols(f"x0:{n}", real=True)
            residual = jet_to_sympy(p, syms)
            residual -= expr_to_sympy(F, syms)
            for Q, S in zip(Q_list, S_list):
                residual -= expr_to_sympy(S, syms) * jet_to_sympy(Q, syms)
            id_ok = sympy.simplify(sympy.together(residual)) == 0
            id_method = "plateau-certified symbolic"
        else:
            id_ok, id_method = _sampled_identity(
                lambda x: p.eval(x, mode="float")
                - _safe_float(F, x)
                - sum(_safe_float(S, x) * Q.eval(x, mode="float")
                      for Q, S in zip(Q_list, S_list)),
                omegas, delta, rho / 2, 2 * rho, n, rng)
        report.update({"bounds": rows, "identity": {
            "method": id_method, "zero": id_ok}})
        report["verdict"] = meet(verdict_b, PASS if id_ok else FAIL)
        return report

    # rescaled data shared by C* and C**
    F_t = mul(Const(Fraction(1) / (Fraction(eps) * rho_frac ** m)),
              expr_scale_coords(F, rho_frac))
    S_t = [mul(Const(Fraction(1) / Fraction(A)), expr_scale_coords(S, rho_frac))
           for S in S_list]

    if variant == "C*":
        named = [("Ftilde", F_t)] + [(f"Stilde{i+1}", S)
                                     for i, S in enumerate(S_t)]
        verdict_b, rows = _sampled_bound_check(named, unit_pts, m, n,
                                               lambda name, alpha: 1.0)
        id_ok, id_method = _scaled_identity(p, Q_list, F_t, S_t, eps, A,
                                            rho_frac, omegas, delta, n, rng,
                                            s_star=None)
        report.update({"bounds": rows, "identity": {
            "method": id_method, "zero": id_ok}})
        report["verdict"] = meet(verdict_b, PASS if id_ok else FAIL)
        return report

    if variant == "C**":
        chi = chi_expr(n)
        if chi_constant is None:
            chi_constant = measure_chi_constant(m, n, seed=seed)
        A_target = float(params.get("A_target", chi_constant * A + chi_constant))
        F_s = mul(chi, F_t)
        S_s = [mul(Const(Fraction(A)), chi, S) for S in S_t]
        # global bound: sample a wider radial range, where chi kills
        # everything outside 1/4 < |x| < 4
        wide = unit_pts + [tuple(3.8 * c for c in x) for x in unit_pts[:200]]
        named = [("Fstar", F_s)] + [(f"Sstar{i+1}", S)
                                    for i, S in enumerate(S_s)]
        verdict_b, rows = _sampled_bound_check(named, wide, m, n,
                                               lambda name, alpha: A_target)
        id_ok, id_method = _scaled_identity(p, Q_list, F_s, S_s, eps, 1.0,
                                            rho_frac, omegas, delta, n, rng,
                                            s_star=S_s)
        report.update({"bounds": rows, "chi_constant": chi_constant,
                       "A_target": A_target,
                       "identity": {"method": id_method, "zero": id_ok}})
        report["verdict"] = meet(verdict_b, PASS if id_ok else FAIL)
        return report

    raise DomainError(f"unknown variant {variant!r}")


def _safe_float(e, x):
    v = _try_eval(e, x)
    return 0.0 if v is None else v


def _scaled_identity(p, Q_list, F_expr, S_exprs, eps, A, rho_frac, omegas,
                     delta, n, rng, s_star):
    """Identity for the rescaled variants on 1/2 < |x| < 2 near Omega:
    p(rho x) = eps rho^m F_expr(x) + sum A S_expr_l(x) Q_l(rho x)."""
    boxes = _region_boxes(omegas, delta, 0.5, 2.0, n)
    exprs = [F_expr] + list(S_exprs)
    if _plateaus_certified(exprs, boxes, s_range=(0.5, 2.0), n=n):
        syms = sympy.symbols(f"x0:{n}", real=True)
        eps_s = sympy.Rational(Fraction(eps))
        A_s = sympy.Rational(Fraction(A))
        rho_s = sympy.Rational(rho_frac)
        m = p.sig.m
        residual = jet_to_sympy_scaled(p, syms, rho_frac)
        residual -= eps_s * rho_s ** m * expr_to_sympy(F_expr, syms)
        for Q, S in zip(Q_list, S_exprs):
            residual -= A_s * expr_to_sympy(S, syms) \
                * jet_to_sympy_scaled(Q, syms, rho_frac)
        return sympy.simplify(sympy.together(residual)) == 0, \
            "plateau-certified symbolic"
    m = p.sig.m
    rho = float(rho_frac)

    def residual_at(x):
        xr = tuple(rho * c for c in x)
        val = p.eval(xr, mode="float")
        val -= eps * rho ** m * _safe_float(F_expr, x)
        for Q, S in zip(Q_list, S_exprs):
            val -= A * _safe_float(S, x) * Q.eval(xr, mode="float")
        return val

    return _sampled_identity(residual_at, omegas, delta, 0.5, 2.0, n, rng,
                             direct=True)


def _sampled_identity(residual_at, omegas, delta, s_lo, s_hi, n, rng,
                      direct=False):
    """Fallback residual check on sampled region points (tolerance 1e-9
    relative to the largest term magnitude)."""
    worst = 0.0
    for _ in range(500):
        w = omegas[rng.integers(len(omegas))]
        u = np.asarray(w) + float(rng.uniform(0, delta * 0.98)) * \
            np.asarray(_transverse_unit(rng, n, w))
        u = u / np.linalg.norm(u)
        s = float(rng.uniform(s_lo * 1.01, s_hi * 0.99))
        x = tuple(s * float(c) for c in u)
        try:
            worst = max(worst, abs(residual_at(x)))
        except DomainError:
            continue
    return worst <= 1e-9, "sampled residual"
