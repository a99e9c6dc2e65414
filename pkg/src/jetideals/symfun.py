"""Scalar expression trees on R^n minus the origin.

This is the little function language in which remainders F, multipliers
S_l, cutoffs and gauges are written: rational-coefficient arithmetic,
division, vector norms, a polynomial smoothstep cutoff theta, and
registered gauges.  The language is closed under partial differentiation
(cutoff nodes carry their derivative order; gauges are not
differentiable), and every node evaluates in float or outward-rounded
interval mode.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, ParseError
from .interval import Interval
from .jetring import _tokenize, variable_names

# ---------------------------------------------------------------------------
# Expression nodes.
# ---------------------------------------------------------------------------


class ScalarExpr:
    """Base class; nodes are immutable and hashable by structure."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    def __sub__(self, other):
        return add(self, mul(Const(-1), _coerce(other)))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __neg__(self):
        return mul(Const(-1), self)

    def __repr__(self):
        return f"<{type(self).__name__}: {expr_str(self)}>"


def _coerce(x):
    if isinstance(x, ScalarExpr):
        return x
    return Const(Fraction(x))


class Const(ScalarExpr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)

    def __eq__(self, other):
        return isinstance(other, Const) and self.value == other.value

    def __hash__(self):
        return hash(("const", self.value))


class Coord(ScalarExpr):
    __slots__ = ("i",)

    def __init__(self, i):
        self.i = int(i)

    def __eq__(self, other):
        return isinstance(other, Coord) and self.i == other.i

    def __hash__(self):
        return hash(("coord", self.i))


class Add(ScalarExpr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)

    def __eq__(self, other):
        return isinstance(other, Add) and self.terms == other.terms

    def __hash__(self):
        return hash(("add", self.terms))


class Mul(ScalarExpr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)

    def __eq__(self, other):
        return isinstance(other, Mul) and self.factors == other.factors

    def __hash__(self):
        return hash(("mul", self.factors))


class Pow(ScalarExpr):
    """Integer power, exponent >= 2 (lower powers simplify away)."""

    __slots__ = ("base", "k")

    def __init__(self, base, k):
        self.base = base
        self.k = int(k)

    def __eq__(self, other):
        return isinstance(other, Pow) and (self.base, self.k) == (other.base, other.k)

    def __hash__(self):
        return hash(("pow", self.base, self.k))


class Div(ScalarExpr):
    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    def __eq__(self, other):
        return isinstance(other, Div) and (self.num, self.den) == (other.num, other.den)

    def __hash__(self):
        return hash(("div", self.num, self.den))


class Norm(ScalarExpr):
    """Euclidean norm of the sub-vector with the given coordinate indices."""

    __slots__ = ("indices",)

    def __init__(self, indices):
        self.indices = tuple(sorted(set(int(i) for i in indices)))
        if not self.indices:
            raise ValueError("norm needs at least one coordinate")

    def __eq__(self, other):
        return isinstance(other, Norm) and self.indices == other.indices

    def __hash__(self):
        return hash(("norm", self.indices))


class Cutoff(ScalarExpr):
    """theta^(order)(arg / scale) for a polynomial smoothstep theta."""

    __slots__ = ("spec", "arg", "scale", "order")

    def __init__(self, spec, arg, scale, order=0):
        scale = Fraction(scale)
        if scale <= 0:
            raise ValueError("cutoff scale must be positive")
        self.spec = spec
        self.arg = arg
        self.scale = scale
        self.order = int(order)

    def __eq__(self, other):
        return (isinstance(other, Cutoff)
                and (self.spec, self.arg, self.scale, self.order)
                == (other.spec, other.arg, other.scale, other.order))

    def __hash__(self):
        return hash(("cutoff", id(self.spec), self.arg, self.scale, self.order))


class GaugeRef(ScalarExpr):
    """g(arg) for a registered gauge g (not differentiable)."""

    __slots__ = ("gauge", "arg")

    def __init__(self, gauge, arg):
        self.gauge = gauge
        self.arg = arg

    def __eq__(self, other):
        return (isinstance(other, GaugeRef)
                and (self.gauge, self.arg) == (other.gauge, other.arg))

    def __hash__(self):
        return hash(("gauge", id(self.gauge), self.arg))


ZERO = Const(0)
ONE = Const(1)


# -- smart constructors (light, idempotent simplification) ------------------

def add(*terms):
    flat = []
    const = Fraction(0)
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    out = []
    for t in flat:
        if isinstance(t, Const):
            const += t.value
        else:
            out.append(t)
    if const != 0:
        out.append(Const(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(out)


def mul(*factors):
    flat = []
    const = Fraction(1)
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        else:
            flat.append(f)
    out = []
    for f in flat:
        if isinstance(f, Const):
            const *= f.value
        else:
            out.append(f)
    if const == 0:
        return ZERO
    if const != 1:
        out.insert(0, Const(const))
    if not out:
        return ONE
    if len(out) == 1:
        return out[0]
    return Mul(out)


def div(num, den):
    if isinstance(den, Const):
        if den.value == 0:
            raise DomainError("division by constant zero")
        return mul(Const(Fraction(1, 1) / den.value), num)
    if num == ZERO:
        return ZERO
    return Div(num, den)


def ipow(base, k):
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    if k < 0:
        return div(ONE, ipow(base, -k))
    if isinstance(base, Const):
        return Const(base.value ** k)
    return Pow(base, k)


# ---------------------------------------------------------------------------
# Differentiation.
# ---------------------------------------------------------------------------

def expr_diff(e: ScalarExpr, i: int) -> ScalarExpr:
    """Exact partial derivative with respect to coordinate i."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Coord):
        return ONE if e.i == i else ZERO
    if isinstance(e, Add):
        return add(*(expr_diff(t, i) for t in e.terms))
    if isinstance(e, Mul):
        parts = []
        for j, f in enumerate(e.factors):
            df = expr_diff(f, i)
            if df == ZERO:
                continue
            rest = e.factors[:j] + e.factors[j + 1:]
            parts.append(mul(df, *rest))
        return add(*parts) if parts else ZERO
    if isinstance(e, Pow):
        db = expr_diff(e.base, i)
        if db == ZERO:
            return ZERO
        return mul(Const(e.k), ipow(e.base, e.k - 1), db)
    if isinstance(e, Div):
        du = expr_diff(e.num, i)
        dv = expr_diff(e.den, i)
        if dv == ZERO:
            return div(du, e.den)
        return div(add(mul(du, e.den), mul(Const(-1), mul(e.num, dv))),
                   ipow(e.den, 2))
    if isinstance(e, Norm):
        if i not in e.indices:
            return ZERO
        return div(Coord(i), e)
    if isinstance(e, Cutoff):
        if e.order + 1 > e.spec.q:
            raise DomainError(
                f"cutoff differentiated past registered smoothness {e.spec.q}")
        da = expr_diff(e.arg, i)
        if da == ZERO:
            return ZERO
        inner = Cutoff(e.spec, e.arg, e.scale, e.order + 1)
        return mul(Const(Fraction(1, 1) / e.scale), inner, da)
    if isinstance(e, GaugeRef):
        raise DomainError("gauge nodes are not differentiable")
    raise TypeError(f"unknown node {e!r}")


def expr_derive(e: ScalarExpr, alpha) -> ScalarExpr:
    """Iterated partial derivative for a multi-index."""
    out = e
    for i, a in enumerate(alpha):
        for _ in range(a):
            out = expr_diff(out, i)
    return out


# ---------------------------------------------------------------------------
# Evaluation.
# ---------------------------------------------------------------------------

def expr_eval(e: ScalarExpr, point, mode: str = "float"):
    """Value (mode="float") or sound enclosure (mode="interval").

    Division by zero — or by an interval containing zero — raises
    DomainError rather than producing infinities.
    """
    if mode == "float":
        return _eval_float(e, [float(c) for c in point])
    if mode == "interval":
        box = [c if isinstance(c, Interval) else Interval.exact(c)
               for c in point]
        return _eval_interval(e, box)
    raise ValueError(f"unknown eval mode {mode!r}")


def _eval_float(e, x):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Coord):
        return x[e.i]
    if isinstance(e, Add):
        return sum(_eval_float(t, x) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= _eval_float(f, x)
        return out
    if isinstance(e, Pow):
        return _eval_float(e.base, x) ** e.k
    if isinstance(e, Div):
        den = _eval_float(e.den, x)
        if den == 0.0:
            raise DomainError("division by zero during evaluation")
        return _eval_float(e.num, x) / den
    if isinstance(e, Norm):
        return math.sqrt(sum(x[i] ** 2 for i in e.indices))
    if isinstance(e, Cutoff):
        v = _eval_float(e.arg, x) / float(e.scale)
        return e.spec.eval(v, e.order)
    if isinstance(e, GaugeRef):
        return e.gauge.eval(_eval_float(e.arg, x))
    raise TypeError(f"unknown node {e!r}")


def _eval_interval(e, box):
    if isinstance(e, Const):
        return Interval.exact(e.value)
    if isinstance(e, Coord):
        return box[e.i]
    if isinstance(e, Add):
        out = Interval(0.0, 0.0)
        for t in e.terms:
            out = out + _eval_interval(t, box)
        return out
    if isinstance(e, Mul):
        out = Interval(1.0, 1.0)
        for f in e.factors:
            out = out * _eval_interval(f, box)
        return out
    if isinstance(e, Pow):
        return _eval_interval(e.base, box).ipow(e.k)
    if isinstance(e, Div):
        return _eval_interval(e.num, box) / _eval_interval(e.den, box)
    if isinstance(e, Norm):
        acc = Interval(0.0, 0.0)
        for i in e.indices:
            acc = acc + box[i].ipow(2)
        return acc.sqrt()
    if isinstance(e, Cutoff):
        v = _eval_interval(e.arg, box) / Interval.exact(e.scale)
        return e.spec.eval_interval(v, e.order)
    if isinstance(e, GaugeRef):
        return e.gauge.eval_interval(_eval_interval(e.arg, box))
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# Structural homogeneity degree.
# ---------------------------------------------------------------------------

def hom_degree(e: ScalarExpr):
    """Homogeneity degree d with e(s x) = s^d e(x), read off the tree.

    Returns an int/Fraction, or None when the tree gives no uniform
    degree (mixed-degree sums, cutoff or gauge nodes).  Conservative:
    None never means "definitely inhomogeneous".
    """
    if isinstance(e, Const):
        return 0
    if isinstance(e, Coord) or isinstance(e, Norm):
        return 1
    if isinstance(e, Add):
        degs = {hom_degree(t) for t in e.terms}
        if len(degs) == 1 and None not in degs:
            return degs.pop()
        return None
    if isinstance(e, Mul):
        total = 0
        for f in e.factors:
            d = hom_degree(f)
            if d is None:
                return None
            total += d
        return total
    if isinstance(e, Pow):
        d = hom_degree(e.base)
        return None if d is None else d * e.k
    if isinstance(e, Div):
        dn, dd = hom_degree(e.num), hom_degree(e.den)
        if dn is None or dd is None:
            return None
        return dn - dd
    return None  # Cutoff, GaugeRef


# ---------------------------------------------------------------------------
# Printing.
# ---------------------------------------------------------------------------

def expr_str(e: ScalarExpr, n: int = 4) -> str:
    names = variable_names(n)

    def name(i):
        return names[i] if i < len(names) else f"x{i + 1}"

    def go(node, parent_prec):
        if isinstance(node, Const):
            s = str(node.value)
            return f"({s})" if node.value < 0 and parent_prec > 0 else s
        if isinstance(node, Coord):
            return name(node.i)
        if isinstance(node, Add):
            body = " + ".join(go(t, 1) for t in node.terms)
            body = body.replace("+ -", "- ").replace("+ (-", "- (")
            return f"({body})" if parent_prec > 1 else body
        if isinstance(node, Mul):
            body = "*".join(go(f, 2) for f in node.factors)
            return f"({body})" if parent_prec > 2 else body
        if isinstance(node, Div):
            return f"{go(node.num, 3)}/{go(node.den, 3)}"
        if isinstance(node, Pow):
            return f"{go(node.base, 3)}^{node.k}"
        if isinstance(node, Norm):
            return "norm(" + ",".join(name(i) for i in node.indices) + ")"
        if isinstance(node, Cutoff):
            inner = go(node.arg, 0)
            tag = f"theta{'^' + str(node.order) if node.order else ''}"
            return f"{tag}({inner}, {node.scale})"
        if isinstance(node, GaugeRef):
            return f"gauge({node.gauge.name}, {go(node.arg, 0)})"
        raise TypeError(f"unknown node {node!r}")

    return go(e, 0)


# ---------------------------------------------------------------------------
# Cutoff: polynomial smoothstep spline.
# ---------------------------------------------------------------------------

def _smoothstep_coeffs(q: int):
    """Coefficients of the degree-(2q+1) smoothstep S with S(0)=0, S(1)=1
    and q vanishing derivatives at both ends; index = power of u."""
    coeffs = {}
    for k in range(q + 1):
        c = Fraction((-1) ** k * math.comb(q + k, k) * math.comb(2 * q + 1, q - k))
        coeffs[q + 1 + k] = c
    out = [Fraction(0)] * (2 * q + 2)
    for p, c in coeffs.items():
        out[p] = c
    return out


def _poly_deriv(coeffs):
    return [Fraction(k) * c for k, c in enumerate(coeffs)][1:] or [Fraction(0)]


def _poly_eval_fraction(coeffs, u: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


def _poly_eval_interval(coeffs, u: Interval) -> Interval:
    acc = Interval(0.0, 0.0)
    for c in reversed(coeffs):
        acc = acc * u + Interval.exact(c)
    return acc


class CutoffSpec:
    """Cutoff theta: 1 on [0,a], 0 on [b,inf), a degree-(2q+1) smoothstep
    spline in between.  Exact rational coefficients; certified sup bounds
    for |theta^(k)|, k <= q, measured once by interval subdivision."""

    def __init__(self, q: int = 3, a=4, b=8):
        if q < 1:
            raise ValueError("need q >= 1")
        self.q = q
        self.a = Fraction(a)
        self.b = Fraction(b)
        if not 0 <= self.a < self.b:
            raise ValueError("need 0 <= a < b")
        self.width = self.b - self.a
        # theta(t) = 1 - S((t-a)/(b-a)); store derivative polys of S in u
        self._polys = [_smoothstep_coeffs(q)]
        for _ in range(q):
            self._polys.append(_poly_deriv(self._polys[-1]))
        self.derivative_bounds = [self._measure_bound(k) for k in range(q + 1)]

    def _measure_bound(self, k: int) -> float:
        """Certified upper bound for sup |theta^(k)| (outer scaling included)."""
        if k == 0:
            return 1.0
        poly = self._polys[k]
        pieces = 1 << 10
        top = 0.0
        for j in range(pieces):
            u = Interval(j / pieces, (j + 1) / pieces)
            top = max(top, abs(_poly_eval_interval(poly, u)).hi)
        return top / float(self.width) ** k

    def eval(self, v: float, order: int = 0) -> float:
        if order > self.q:
            raise DomainError("cutoff derivative order beyond smoothness")
        a, b = float(self.a), float(self.b)
        if v <= a:
            return 1.0 if order == 0 else 0.0
        if v >= b:
            return 0.0
        u = Fraction(v - a) / self.width
        val = float(_poly_eval_fraction(self._polys[order], u))
        val /= float(self.width) ** order
        return 1.0 - val if order == 0 else -val

    def eval_interval(self, v: Interval, order: int = 0) -> Interval:
        if order > self.q:
            raise DomainError("cutoff derivative order beyond smoothness")
        a, b = float(self.a), float(self.b)
        pieces = []
        if v.lo < a:
            pieces.append(Interval.exact(1.0 if order == 0 else 0.0))
        if v.hi > b:
            pieces.append(Interval.exact(0.0))
        mid = v.intersect(Interval(a, b))
        if mid is not None and mid.width >= 0:
            u = (mid - a) / Interval.exact(self.width)
            u = u.intersect(Interval(0.0, 1.0)) or Interval(0.0, 0.0)
            val = _poly_eval_interval(self._polys[order], u)
            val = val / Interval.exact(self.width).ipow(order)
            pieces.append(Interval.exact(1.0) - val if order == 0 else -val)
        return Interval.hull(pieces)


DEFAULT_CUTOFF = CutoffSpec(q=3, a=4, b=8)


# ---------------------------------------------------------------------------
# Gauges and gauge regularization.
# ---------------------------------------------------------------------------

class Gauge:
    """A positive scale function sampled on a log grid of (0, 1].

    Values are clamped to <= 1.  Evaluation interpolates linearly in
    log2(t) and clamps beyond the grid ends.
    """

    def __init__(self, name, log2_grid, values):
        self.name = name
        grid = np.asarray(log2_grid, dtype=float)
        vals = np.minimum(np.asarray(values, dtype=float), 1.0)
        order = np.argsort(grid)
        self.log2_grid = grid[order]
        self.values = vals[order]
        if np.any(self.values <= 0):
            raise DomainError("gauge samples must be strictly positive")

    @staticmethod
    def from_function(name, fn, j_min=-60.0, j_max=0.0, per_octave=1024):
        steps = int(round((j_max - j_min) * per_octave)) + 1
        grid = np.linspace(j_min, j_max, steps)
        vals = [min(1.0, float(fn(2.0 ** j))) for j in grid]
        return Gauge(name, grid, vals)

    def eval(self, t: float) -> float:
        if t <= 0:
            raise DomainError("gauge argument must be positive")
        return float(np.interp(math.log2(t), self.log2_grid, self.values))

    def eval_array(self, t):
        return np.interp(np.log2(t), self.log2_grid, self.values)

    def eval_interval(self, v: Interval) -> Interval:
        if v.lo <= 0:
            raise DomainError("gauge argument must be positive")
        # linear interpolation between samples: hull over the grid nodes
        # inside the interval plus the two endpoint values
        lo_j, hi_j = math.log2(v.lo), math.log2(v.hi)
        vals = [self.eval(v.lo), self.eval(v.hi)]
        inside = self.values[(self.log2_grid >= lo_j) & (self.log2_grid <= hi_j)]
        vals.extend(float(x) for x in inside)
        pad = 1e-12 * max(abs(min(vals)), abs(max(vals)), 1.0)
        return Interval(min(vals) - pad, max(vals) + pad)


def _bump(v):
    """C^infinity bump supported in [1/2, 2]."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    mask = (v > 0.5) & (v < 2.0)
    vv = v[mask]
    out[mask] = np.exp(-1.0 / ((vv - 0.5) * (2.0 - vv)))
    return out


class RegularizedGauge:
    """Output of gauge_regularize: the envelope g~, the mollified g*, the
    final g+ = C''*g*, and the measured constants / check results."""

    def __init__(self, source, tilde, gstar_fn, c_second, report):
        self.source = source
        self.tilde = tilde          # Gauge holding the sup envelope
        self._gstar_fn = gstar_fn
        self.c_second = c_second
        self.report = report

    def g_tilde(self, t):
        return self.tilde.eval(t)

    def g_star(self, t):
        return self._gstar_fn(t)

    def g_plus(self, t):
        return self.c_second * self._gstar_fn(t)

    def as_gauge(self, name=None):
        name = name or f"{self.source.name}_plus"
        grid = self.tilde.log2_grid
        vals = np.minimum(self.c_second * np.array(
            [self._gstar_fn(2.0 ** j) for j in grid]), 1.0)
        return Gauge(name, grid, vals)


def gauge_regularize(g: Gauge, check_scales=20) -> RegularizedGauge:
    """Regularize a gauge: sup envelope, mollification, calibration.

    g~(t)  = sup_s (2t/(t+s)) g(s)   -- computed over a dense log grid of
             s with s=t always included, so g~ >= g holds exactly on the
             evaluation grid; the tail s > s_max is dominated using
             2t/(t+s) <= 2t/s.
    g*(t)  = integral of phi(v) g~(t/v) dv/v over v in [1/2,2] with a
             smooth bump phi, evaluated by Simpson in log v and
             normalized so g* is a convex combination of g~ values.
    g+     = C'' g* with C'' = max g~/g* on the grid, so g+ >= g~ >= g.

    The report records quasi-doubling factors, finite-difference
    derivative constants, and the decay trend of g+.
    """
    # dense s grid: 2^-60 .. 2^0, 1024 samples per octave
    s_log2 = np.linspace(-60.0, 0.0, 60 * 1024 + 1)
    s = np.exp2(s_log2)
    gs = g.eval_array(s)

    # evaluation grid for g~, slightly wider than (0,1] so that the
    # mollifier can look one octave past both ends
    t_log2 = np.arange(-62.0, 2.0 + 1e-9, 0.125)
    t_vals = np.exp2(t_log2)
    tilde_vals = np.empty_like(t_vals)
    for idx, t in enumerate(t_vals):
        weights = 2.0 * t / (t + s)
        cand = float(np.max(weights * gs))
        # include s = t exactly (weight 1): guarantees g~(t) >= g(t)
        if 2.0 ** -60 <= t <= 1.0:
            cand = max(cand, g.eval(t))
        # tail s > 1: g(s) extends as g(1), weight <= 2t/s decreasing,
        # so the tail sup is at s = 1 which the grid already contains
        tilde_vals[idx] = min(cand, 2.0)
    tilde = Gauge(f"{g.name}_tilde", t_log2, np.minimum(tilde_vals, 1.0))
    # keep the unclamped envelope for ratio checks
    tilde_fn = lambda t: float(np.interp(math.log2(t), t_log2, tilde_vals))

    # mollifier weights: Simpson in u = log v on [log 1/2, log 2]
    n_quad = 64
    u = np.linspace(math.log(0.5), math.log(2.0), n_quad + 1)
    w = np.ones(n_quad + 1)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    w *= (u[1] - u[0]) / 3.0
    phi_w = w * _bump(np.exp(u))
    phi_w /= phi_w.sum()  # convex combination of g~ samples

    v_nodes = np.exp(u)

    def gstar(t):
        return float(np.dot(phi_w, [tilde_fn(t / v) for v in v_nodes]))

    # calibration constant C'': g+ = C'' g* dominates g~
    check_log2 = np.arange(-60.0, 0.0 + 1e-9, 0.5)
    check_t = np.exp2(check_log2)
    ratio = [tilde_fn(t) / gstar(t) for t in check_t]
    c_second = float(max(ratio))

    # quasi-doubling of g~ on grid pairs with ratio in [1/2, 2]
    qd_worst = 1.0
    for tl in check_log2:
        for dl in (-1.0, -0.5, 0.5, 1.0):
            t2l = tl + dl
            if t2l < -62.0 or t2l > 2.0:
                continue
            r = tilde_fn(2.0 ** tl) / tilde_fn(2.0 ** t2l)
            qd_worst = max(qd_worst, r, 1.0 / r)

    # finite-difference derivative constants |D^k g*| <= C' t^-k g~
    c_prime = [0.0, 0.0, 0.0]
    for t in np.exp2(np.arange(-40.0, -1.0 + 1e-9, 1.0)):
        h = t / 16.0
        f0, fp, fm = gstar(t), gstar(t + h), gstar(t - h)
        gt = tilde_fn(t)
        c_prime[0] = max(c_prime[0], abs(f0) / gt)
        c_prime[1] = max(c_prime[1], abs((fp - fm) / (2 * h)) * t / gt)
        c_prime[2] = max(c_prime[2], abs((fp - 2 * f0 + fm) / h ** 2) * t * t / gt)

    # decay trend of g+ over dyadic scales
    plus_vals = [c_second * gstar(2.0 ** -j) for j in range(1, check_scales + 1)]
    monotone = all(b <= a * (1.0 + 1e-9)
                   for a, b in zip(plus_vals, plus_vals[1:]))
    decays = plus_vals[-1] <= 0.5 * plus_vals[0]

    grid_t = np.exp2(g.log2_grid)
    tilde_on_grid = np.array([tilde_fn(t) for t in grid_t])
    report = {
        "envelope_dominates": bool(np.all(tilde_on_grid >= g.values - 1e-15)),
        "quasi_doubling_factor": qd_worst,
        "quasi_doubling_ok": qd_worst <= 4.0 + 1e-9,
        "derivative_constants": [float(c) for c in c_prime],
        "calibration_constant": c_second,
        "plus_values": plus_vals,
        "decay_monotone": monotone,
        "decay_halves": decays,
        "decays": monotone and decays,
    }
    return RegularizedGauge(g, tilde, gstar, c_second, report)


# ---------------------------------------------------------------------------
# Parsing the extended expression grammar.
# ---------------------------------------------------------------------------

class _ExprParser:
    """Polynomial grammar plus '/', abs2(...), norm(...), theta(e, scale),
    gauge(name, e)."""

    def __init__(self, text, n, gauges=None, cutoff=None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n
        self.names = {name: i for i, name in enumerate(variable_names(n))}
        self.gauges = gauges or {}
        self.cutoff = cutoff or DEFAULT_CUTOFF

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        e = self.parse_sum()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", pos)
        return e

    def parse_sum(self):
        kind, val, _ = self.peek()
        neg = False
        if kind == "op" and val in "+-":
            self.next()
            neg = val == "-"
        e = self.parse_product()
        if neg:
            e = mul(Const(-1), e)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.parse_product()
                e = add(e, mul(Const(-1), rhs) if val == "-" else rhs)
            else:
                return e

    def parse_product(self):
        e = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.next()
                e = mul(e, self.parse_factor())
            elif kind == "op" and val == "/":
                self.next()
                e = div(e, self.parse_factor())
            elif kind == "name" or (kind == "op" and val == "("):
                e = mul(e, self.parse_factor())
            else:
                return e

    def parse_factor(self):
        kind, val, pos = self.next()
        if kind == "num":
            base = Const(val)
        elif kind == "name":
            base = self.parse_named(val, pos)
        elif kind == "op" and val == "(":
            base = self.parse_sum()
            self.expect_op(")")
        elif kind == "op" and val == "-":
            return mul(Const(-1), self.parse_factor())
        else:
            raise ParseError("expected a term", pos)
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, exp, pos = self.next()
            neg = False
            if kind == "op" and exp == "-":
                neg = True
                kind, exp, pos = self.next()
            if kind != "num" or exp.denominator != 1:
                raise ParseError("exponent must be an integer", pos)
            k = -int(exp) if neg else int(exp)
            return ipow(base, k)
        return base

    def parse_named(self, name, pos):
        kind, val, _ = self.peek()
        calling = kind == "op" and val == "("
        if name in self.names and not calling:
            return Coord(self.names[name])
        if name in ("abs2", "norm"):
            self.expect_op("(")
            indices = self.parse_coord_list()
            self.expect_op(")")
            if not indices:
                indices = list(range(self.n))
            if name == "norm":
                return Norm(indices)
            return add(*(ipow(Coord(i), 2) for i in indices))
        if name == "theta":
            self.expect_op("(")
            arg = self.parse_sum()
            self.expect_op(",")
            scale = self.parse_rational()
            self.expect_op(")")
            return Cutoff(self.cutoff, arg, scale)
        if name == "gauge":
            self.expect_op("(")
            kind, gname, gpos = self.next()
            if kind != "name":
                raise ParseError("expected gauge name", gpos)
            if gname not in self.gauges:
                raise ParseError(f"unknown gauge {gname!r}", gpos)
            self.expect_op(",")
            arg = self.parse_sum()
            self.expect_op(")")
            return GaugeRef(self.gauges[gname], arg)
        if name in self.names:
            return Coord(self.names[name])
        raise ParseError(f"unknown name {name!r}", pos)

    def parse_coord_list(self):
        indices = []
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == ")":
                return indices
            kind, val, pos = self.next()
            if kind != "name" or val not in self.names:
                raise ParseError("expected a coordinate name", pos)
            indices.append(self.names[val])
            kind, val, _ = self.peek()
            if kind == "op" and val == ",":
                self.next()

    def parse_rational(self):
        sign = 1
        kind, val, pos = self.next()
        if kind == "op" and val == "-":
            sign = -1
            kind, val, pos = self.next()
        if kind != "num":
            raise ParseError("expected a number", pos)
        out = Fraction(val)
        kind, nval, _ = self.peek()
        if kind == "op" and nval == "/":
            self.next()
            kind, den, pos = self.next()
            if kind != "num" or den == 0:
                raise ParseError("bad rational denominator", pos)
            out /= den
        return sign * out


def expr_parse(text: str, n: int, gauges=None, cutoff=None) -> ScalarExpr:
    """Parse the extended expression grammar into a ScalarExpr tree."""
    return _ExprParser(text, n, gauges=gauges, cutoff=cutoff).parse()
