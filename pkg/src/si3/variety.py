"""The classifying variety: rotation-adapted variables, quadratic identities,
degree-bounded ideal membership and the translation derivatives.

Abstract polynomials in the ten canonical variables reuse the ten registry
slots of ``Poly`` as indeterminates.  Two slot layouts are used:

* D-layout: slot k holds ``INDEPENDENT[k]`` (A12, A13, ..., C33);
* XY-layout: slots 0..2 hold X_{-1}, X_0, X_{+1} and slots 3..9 hold
  Y_{-3}, ..., Y_{+3}.

``to_d`` rewrites an XY-layout polynomial in the D-layout.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from gmpy2 import mpq

from .algebra import ExtScalar, Poly, RatFn
from .algebra.linalg import Echelon, rank
from .algebra.poly import NVARS, key_degree, key_exponents, monomial_key
from .algebra.ratfn import common_denominator
from .canonical import INDEPENDENT, CanonCoeffs, extract_from_potential

I = ExtScalar.gen("i")
DIRECTIONS = ("+", "-", "z")
GENERATOR_NAMES = ("a", "b", "c", "d", "e", "f")


def _q(n, d=1):
    return ExtScalar(mpq(n, d))


def _sq(n):
    return ExtScalar.sqrt(n)


def _isq(n):
    return ExtScalar.sqrt(n).inv()


# -- slot helpers ----------------------------------------------------------------

def dvar(name):
    return Poly.var(INDEPENDENT.index(name))


def xs(m):
    return Poly.var(1 + m)


def ys(m):
    return Poly.var(6 + m)


XY_KEYS = [("X", m) for m in (-1, 0, 1)] + [("Y", m) for m in range(-3, 4)]


def _slot(kind, m):
    return 1 + m if kind == "X" else 6 + m


# -- the linear change of variables ----------------------------------------------

def _xy_forms():
    A12, A13, A22, A23, A33, B12, B22, B23, B33, C33 = (dvar(n) for n in INDEPENDENT)
    X = {
        1: A33 + 3 * B12 - 2 * A22 + I * (3 * A12 + B33 + B22),
        0: -_sq(2) * (C33 + 2 * A13 + B23),
        -1: -A33 - 3 * B12 + 2 * A22 + I * (3 * A12 + B33 + B22),
    }
    r35 = _sq(3) * _isq(5)
    Y = {
        3: A22 + 2 * B12 + I * (B22 - 2 * A12),
        2: _sq(6) * (A13 - B23 + 2 * I * A23),
        1: r35 * (3 * A22 - 2 * B12 - 4 * A33 + I * (B22 - 2 * A12 - 4 * B33)),
        0: 2 * _isq(5) * (2 * C33 - A13 - 3 * B23),
        -1: r35 * (2 * B12 + 4 * A33 - 3 * A22 + I * (B22 - 2 * A12 - 4 * B33)),
        -2: _sq(6) * (A13 - B23 - 2 * I * A23),
        -3: -A22 - 2 * B12 + I * (B22 - 2 * A12),
    }
    return {("X", m): X[m] for m in X} | {("Y", m): Y[m] for m in Y}


XY_FORMS = _xy_forms()
XY_TO_D = {_slot(*k): v for k, v in XY_FORMS.items()}


def to_d(p: Poly) -> Poly:
    """Rewrite an XY-layout polynomial in the D-layout."""
    return p.subs(XY_TO_D)


@lru_cache(maxsize=None)
def inverse_forms():
    """D_k as linear XY-layout polynomials (inverse of the change of variables)."""
    e = Echelon()
    for k, key in enumerate(XY_KEYS):
        e.add(XY_FORMS[key], k)
    if e.rank != 10:
        raise ArithmeticError("change of variables is singular")
    out = []
    for k in range(10):
        sol = e.solve(Poly.var(k))
        p = Poly()
        for lab, c in sol.items():
            p = p + Poly.var(_slot(*XY_KEYS[lab])) * c
        out.append(p)
    return out


def from_xy_forms(p: Poly) -> Poly:
    """Rewrite a D-layout polynomial in the XY-layout."""
    return p.subs(dict(enumerate(inverse_forms())))


# -- evaluation ------------------------------------------------------------------

def _values(point):
    if isinstance(point, CanonCoeffs):
        return [point.c[k] for k in INDEPENDENT]
    if isinstance(point, XYTuple):
        return point.values()
    vals = list(point)
    if len(vals) != 10:
        raise ValueError("expected ten values")
    return vals


def evaluate(p: Poly, vals):
    """Value of a slot polynomial at ten RatFn or ExtScalar values."""
    if all(not isinstance(v, RatFn) for v in vals):
        out = p.evaluate({k: ExtScalar._coerce(v) for k, v in enumerate(vals)})
        return out.constant_value() if out.terms else ExtScalar()
    lcm, nums = common_denominator(vals)
    parts = {}
    for key, c in p.terms.items():
        parts.setdefault(key_degree(key), {})[key] = c
    total = RatFn(Poly())
    for d, terms in parts.items():
        num = Poly(terms).subs(dict(enumerate(nums)))
        total = total + RatFn._make(num, {f: e * d for f, e in lcm.items() if e * d})
    return total


@dataclass
class XYTuple:
    X: dict   # m in -1..1
    Y: dict   # m in -3..3

    def values(self):
        return [self.X[m] for m in (-1, 0, 1)] + [self.Y[m] for m in range(-3, 4)]

    @classmethod
    def from_values(cls, vals):
        vals = list(vals)
        return cls({m: vals[1 + m] for m in (-1, 0, 1)}, {m: vals[6 + m] for m in range(-3, 4)})

    def is_zero(self):
        return all(not v for v in self.values())


def _zero_like(vals):
    return RatFn(Poly()) if any(isinstance(v, RatFn) for v in vals) else ExtScalar()


def _lin(p, vals):
    zero = _zero_like(vals)
    out = zero
    for key, c in p.coefficients().items():
        k = key_exponents(key).index(1)
        term = vals[k] * (RatFn(Poly.const(c)) if isinstance(zero, RatFn) else c)
        out = out + term
    return out


def to_xy(cc) -> XYTuple:
    vals = _values(cc)
    return XYTuple.from_values([_lin(XY_FORMS[k], vals) for k in XY_KEYS])


def from_xy(xy: XYTuple) -> CanonCoeffs | list:
    vals = xy.values()
    out = [_lin(f, vals) for f in inverse_forms()]
    if any(isinstance(v, RatFn) for v in out):
        return CanonCoeffs(dict(zip(INDEPENDENT, out)))
    return out


def real_form(xy: XYTuple):
    """(X_1, X_2, X_3), (Y_1, ..., Y_7) from the spherical components."""
    X, Y = xy.X, xy.Y
    r = _sq(5) * _isq(3)

    def sc(v, c):
        return v * (RatFn(Poly.const(c)) if isinstance(v, RatFn) else c)

    two_i = 2 * I
    Xr = (sc(X[0], -_isq(2)), sc(X[-1] - X[1], _q(1, 2)), sc(X[-1] + X[1], two_i.inv()))
    Yr = (
        sc(Y[3] - Y[-3], _q(1, 2)),
        sc(Y[3] + Y[-3], two_i.inv()),
        sc(Y[2] - Y[-2], (two_i * _sq(6)).inv()),
        sc(Y[2] + Y[-2], (2 * _sq(6)).inv()),
        sc(Y[1] - Y[-1], r / 2),
        sc(Y[1] + Y[-1], r / two_i),
        sc(Y[0], _sq(5) / 2),
    )
    return Xr, Yr


def table_form(xy: XYTuple):
    """Real form in the axis convention of the printed table: the X block is
    (-X_2, X_3, -X_1); the Y block is unchanged."""
    (X1, X2, X3), Yr = real_form(xy)
    return (-X2, X3, -X1), Yr


# -- identities -----------------------------------------------------------------

def _i_forms():
    A12, A13, A22, A23, A33, B12, B22, B23, B33, C33 = (dvar(n) for n in INDEPENDENT)
    return [
        -A22 * B23 + B23 * A33 + B12 * A13 + A23 * B22 - A12 * A23 - A23 * B33,
        A33 ** 2 + B12 * A33 - A33 * A22 - A12 * B33 - A13 * C33 + A12 * B22
        - B12 * A22 + A13 * B23 - A12 ** 2,
        B23 * C33 + B12 * A33 + B12 ** 2 + B22 * B33 - B33 ** 2 - A12 * B33 - B23 ** 2,
        -B12 * A23 - A33 * A23 + A13 * B33 + A12 * B23,
        -B23 * A23 + C33 * A23 + A22 * B33 - A33 * B33 + B12 * A12,
        A13 * C33 + 2 * A13 * B23 + B22 * B33 - B33 ** 2 + A33 * A22 - A33 ** 2
        + 2 * A12 * B22 + A12 ** 2 - 2 * B12 * A22 + B12 ** 2 + B23 * C33 - B23 ** 2
        - 3 * A23 ** 2,
    ]


IDEAL = _i_forms()


def _quads():
    X, Y = xs, ys
    s2, s3, s5, s6 = _sq(2), _sq(3), _sq(5), _sq(6)
    Z = {"1a": {0: X(0) ** 2 - 2 * X(-1) * X(1)},
         "1b": {0: Y(0) ** 2 - 2 * Y(-1) * Y(1) + 2 * Y(-2) * Y(2) - 2 * Y(-3) * Y(3)}}
    a, b, c = {}, {}, {}
    for s in (1, -1):
        a[2 * s] = X(s) ** 2
        a[s] = X(0) * X(s) * s2
        b[2 * s] = Y(s) ** 2 - Y(0) * Y(2 * s) * (_sq(10) / s3) + Y(-s) * Y(3 * s) * (s5 / s3)
        b[s] = Y(0) * Y(s) * s3.inv() - Y(-s) * Y(2 * s) * (s5 / s2) + Y(-2 * s) * Y(3 * s) * (5 / s6)
        c[2 * s] = (X(-s) * Y(3 * s) + X(s) * Y(s) * _isq(15) - X(0) * Y(2 * s) * s3.inv())
        c[s] = (X(s) * Y(0) * s5.inv() - X(0) * Y(s) * (2 * s2 / _sq(15))
                + X(-s) * Y(2 * s) * (s2 / s3))
    a[0] = (X(0) ** 2 + X(-1) * X(1)) * (s2 / s3)
    b[0] = Y(0) ** 2 * (s2 / s3) - Y(-1) * Y(1) * (s3 / s2) + Y(-3) * Y(3) * (5 / s6)
    c[0] = (-X(0) * Y(0) * (s3 / s5) + X(-1) * Y(1) * (s2 / s5) + X(1) * Y(-1) * (s2 / s5))
    Z["5a"], Z["5b"], Z["5c"] = a, b, c
    return Z


# -- ladder operators on XY-layout polynomials -------------------------------------

def _coef(l, m, up):
    n = (l - m) * (l + m + 1) if up else (l + m) * (l - m + 1)
    return _sq(n) if n else ExtScalar()


def ladder_poly(p: Poly, op: str) -> Poly:
    """Apply J_+, J_- or J_3 (as derivations) to an XY-layout polynomial."""
    out = Poly()
    for kind, l, rng in (("X", 1, range(-1, 2)), ("Y", 3, range(-3, 4))):
        var = xs if kind == "X" else ys
        for m in rng:
            dp = p.diff(_slot(kind, m))
            if not dp:
                continue
            if op == "J3":
                out = out + dp * var(m) * m
            elif op == "J+" and m < l:
                out = out + dp * var(m + 1) * _coef(l, m, True)
            elif op == "J-" and m > -l:
                out = out + dp * var(m - 1) * _coef(l, m, False)
    return out


def lowered_family(top: Poly, l: int) -> dict:
    """Components f_m, m = l..-l, of a highest-weight vector by lowering."""
    fam = {l: top}
    for m in range(l, -l, -1):
        fam[m - 1] = ladder_poly(fam[m], "J-") / _coef(l, m, False)
    return fam


@lru_cache(maxsize=None)
def quad_basis():
    """The named quadratic families (XY-layout) including the derived ones."""
    Z = _quads()
    s3, s5 = _sq(3), _sq(5)
    z9a = lowered_family(ys(2) ** 2 - ys(1) * ys(3) * (2 * s3 / s5), 4)
    z9b = lowered_family(xs(1) * ys(3), 4)
    out = dict(Z)
    out["9a"], out["9b"] = z9a, z9b
    out["Z"] = {m: 2 * Z["5a"][m] - 5 * Z["5b"][m] + 5 * Z["5c"][m] for m in range(-2, 3)}
    out["W"] = {0: 8 * Z["1a"][0] - 5 * Z["1b"][0]}
    out["5X"] = {m: 5 * Z["5b"][m] + 2 * Z["5a"][m] for m in range(-2, 3)}
    out["9Y"] = {m: 24 * z9b[m] - 5 * z9a[m] for m in range(-4, 5)}
    return out


def zw_forms():
    qb = quad_basis()
    return [qb["Z"][m] for m in range(-2, 3)] + [qb["W"][0]]


def eval_identities(point):
    """Residuals of the identities in both forms: {'I': 6 values, 'ZW': 6 values}."""
    vals = _values(point)
    dvals = vals if not isinstance(point, XYTuple) else _values(from_xy(point))
    xyvals = vals if isinstance(point, XYTuple) else to_xy(dvals).values()
    return {"I": [evaluate(g, dvals) for g in IDEAL],
            "ZW": [evaluate(z, xyvals) for z in zw_forms()]}


def identities_hold(point) -> bool:
    res = eval_identities(point)
    return all(not r for r in res["I"] + res["ZW"])


def span_equivalence(first=None, second=None) -> bool:
    """Whether two lists of D-layout quadratics span the same space."""
    first = IDEAL if first is None else first
    second = [to_d(z) for z in zw_forms()] if second is None else second
    r1, r2 = rank(first), rank(second)
    return r1 == r2 == rank(list(first) + list(second))


# -- ideal membership ------------------------------------------------------------

def _monomials_upto(d):
    out = []
    for k in range(d + 1):
        for combo in combinations_with_replacement(range(NVARS), k):
            ex = [0] * NVARS
            for v in combo:
                ex[v] += 1
            out.append(tuple(ex))
    return out


def ideal_member(q: Poly, gens, multiplier_degree=1):
    """Multipliers {k: Poly} with q = sum_k mult_k * gens[k] and deg mult_k <=
    multiplier_degree, or None when no such certificate exists."""
    if multiplier_degree < 0:
        raise ValueError("multiplier degree must be nonnegative")
    e = Echelon()
    for k, g in enumerate(gens):
        for ex in _monomials_upto(multiplier_degree):
            e.add(g * Poly({monomial_key(ex): 1}), (k, ex))
    sol = e.solve(q)
    if sol is None:
        return None
    mult = {k: Poly() for k in range(len(gens))}
    for (k, ex), c in sol.items():
        mult[k] = mult[k] + Poly.monomial(ex, c)
    return mult


# -- translation derivatives -------------------------------------------------------

def _diffconds():
    qb = quad_basis()
    F, G, A = qb["5X"], qb["9Y"], qb["1a"][0]
    q, s = _q, _isq
    r = {
        ("-", "X", 1): F[0] * (q(1, 30) * s(6)) - A * q(1, 9),
        ("+", "X", 1): F[2] * q(1, 30),
        ("z", "X", 1): F[1] * q(-1, 60),
        ("-", "X", 0): F[-1] * (q(1, 30) * s(2)),
        ("+", "X", 0): F[1] * (q(1, 30) * s(2)),
        ("z", "X", 0): F[0] * (q(-1, 30) * s(3)) - A * (q(1, 9) * s(2)),
        ("-", "X", -1): F[-2] * q(1, 30),
        ("+", "X", -1): F[0] * (q(1, 30) * s(6)) - A * q(1, 9),
        ("z", "X", -1): F[-1] * q(-1, 60),
        ("-", "Y", 3): G[2] * (q(1, 180) * s(7)) + F[2] * q(1, 35),
        ("+", "Y", 3): G[4] * q(1, 90),
        ("z", "Y", 3): G[3] * (q(-1, 180) * s(2)),
        ("-", "Y", 2): G[1] * (q(1, 60) * s(21)) + F[1] * (_sq(2) * q(1, 35) * s(3)),
        ("+", "Y", 2): G[3] * (q(1, 60) * s(3)),
        ("z", "Y", 2): G[2] * (q(-1, 30) * s(42)) + F[2] * (q(1, 35) * s(6)),
        ("-", "Y", 1): G[0] * (q(1, 30) * s(42)) + F[0] * (_sq(2) * q(1, 35) * s(5)),
        ("+", "Y", 1): G[2] * (q(1, 12) * s(105)) + F[2] * (q(1, 35) * s(15)),
        ("z", "Y", 1): G[1] * (q(-1, 12) * s(210)) + F[1] * (q(2, 35) * s(15)),
        ("-", "Y", 0): G[-1] * (q(1, 18) * s(70)) + F[-1] * (q(1, 35) * s(5)),
        ("+", "Y", 0): G[1] * (q(1, 18) * s(70)) + F[1] * (q(1, 35) * s(5)),
        ("z", "Y", 0): G[0] * (q(-1, 45) * s(14)) + F[0] * (_sq(3) * q(1, 35) * s(10)),
        ("-", "Y", -1): G[-2] * (q(1, 12) * s(105)) + F[-2] * (q(1, 35) * s(15)),
        ("+", "Y", -1): G[0] * (q(1, 30) * s(42)) + F[0] * (_sq(2) * q(1, 35) * s(5)),
        ("z", "Y", -1): G[-1] * (q(-1, 12) * s(210)) + F[-1] * (q(2, 35) * s(15)),
        ("-", "Y", -2): G[-3] * (q(1, 60) * s(3)),
        ("+", "Y", -2): G[-1] * (q(1, 60) * s(21)) + F[-1] * (_sq(2) * q(1, 35) * s(3)),
        ("z", "Y", -2): G[-2] * (q(-1, 30) * s(42)) + F[-2] * (q(1, 35) * s(6)),
        ("-", "Y", -3): G[-4] * q(1, 90),
        ("+", "Y", -3): G[-2] * (q(1, 180) * s(7)) + F[-2] * q(1, 35),
        ("z", "Y", -3): G[-3] * (q(-1, 180) * s(2)),
    }
    return r


DIFFCONDS = _diffconds()


def translation_derivative(point, direction) -> XYTuple:
    """Formal derivative of the tuple along d_+, d_- (d_pm = i d_y pm d_x) or d_z."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    xy = point if isinstance(point, XYTuple) else to_xy(point)
    vals = xy.values()
    return XYTuple.from_values([evaluate(DIFFCONDS[(direction,) + k], vals) for k in XY_KEYS])


@lru_cache(maxsize=None)
def d_derivatives(direction):
    """Induced derivatives of the ten D-variables as D-layout quadratics."""
    rows = [DIFFCONDS[(direction,) + k] for k in XY_KEYS]
    out = []
    for f in inverse_forms():
        acc = Poly()
        for key, c in f.coefficients().items():
            acc = acc + rows[XY_KEYS.index(_key_of(key))] * c
        out.append(to_d(acc))
    return tuple(out)


def _key_of(mono):
    slot = key_exponents(mono).index(1)
    return ("X", slot - 1) if slot < 3 else ("Y", slot - 6)


def induced_derivative(p: Poly, direction) -> Poly:
    """Chain rule: derivative of a D-layout polynomial along a direction."""
    dd = d_derivatives(direction)
    out = Poly()
    for k in range(10):
        dp = p.diff(k)
        if dp:
            out = out + dp * dd[k]
    return out


def closure_suite(multiplier_degree=1):
    """Membership of the induced derivatives of the generators.

    ``full``: derivatives of all six against the ideal of all six.
    ``partial``: derivatives of the first five against the first five.
    ``sixth_independent``: the sixth generator lies outside the span of the
    first five (degree-0 membership fails).
    """
    full, partial = {}, {}
    for k, g in enumerate(IDEAL):
        for d in DIRECTIONS:
            dg = induced_derivative(g, d)
            full[(GENERATOR_NAMES[k], d)] = ideal_member(dg, IDEAL, multiplier_degree) is not None
            if k < 5:
                partial[(GENERATOR_NAMES[k], d)] = (
                    ideal_member(dg, IDEAL[:5], multiplier_degree) is not None)
    return {
        "full": full,
        "partial": partial,
        "sixth_independent": ideal_member(IDEAL[5], IDEAL[:5], 0) is None,
    }


def x_module_check(multiplier_degree=1):
    """Each induced derivative of X_m lies in the module generated by the X
    block, modulo the identities."""
    gens = [XY_FORMS[("X", m)] for m in (-1, 0, 1)] + IDEAL
    out = {}
    for m in (-1, 0, 1):
        for d in DIRECTIONS:
            dx = to_d(DIFFCONDS[(d, "X", m)])
            out[(m, d)] = ideal_member(dx, gens, multiplier_degree) is not None
    return out


# -- per-system checks ------------------------------------------------------------

def _potential(sys):
    return sys.potential if hasattr(sys, "potential") else RatFn.coerce(sys)


def system_xy(sys) -> XYTuple:
    return to_xy(extract_from_potential(_potential(sys)))


def coordinate_derivative(f: RatFn, direction):
    if direction == "z":
        return f.diff(2)
    fy = f.diff(1) * RatFn(Poly.const(I))
    return fy + f.diff(0) if direction == "+" else fy - f.diff(0)


def verify_diffconds(sys, xy=None):
    """Check all 30 relations against direct differentiation; returns the
    report {'checked': n, 'failures': [(direction, kind, m), ...]}."""
    xy = xy or system_xy(sys)
    vals = xy.values()
    fails = []
    for d in DIRECTIONS:
        for (kind, m), v in zip(XY_KEYS, vals):
            lhs = coordinate_derivative(v, d)
            rhs = evaluate(DIFFCONDS[(d, kind, m)], vals)
            if not lhs == rhs:
                fails.append((d, kind, m))
    return {"checked": 3 * len(XY_KEYS), "failures": fails}


@lru_cache(maxsize=None)
def invariant_sets():
    qb = quad_basis()
    a, b = qb["5a"], qb["5b"]
    A = qb["1a"][0]
    R5 = [8 * a[m] - 5 * b[m] for m in range(-2, 3)]
    return {
        "R1": [xs(m) for m in (-1, 0, 1)],
        "R2": [ys(m) for m in range(-3, 4)],
        "R3": [4 * a[m] - 15 * b[m] for m in range(-2, 3)] + [A],
        "R4": [3 * a[m] - 5 * b[m] for m in range(-2, 3)] + [A],
        "R5": R5,
        "R6": R5 + [5 * qb["9a"][m] + 6 * qb["9b"][m] for m in range(-4, 5)],
    }


def relative_invariants(sys, xy=None):
    """Six booleans: whether every member of R_1..R_6 vanishes for the system."""
    xy = xy or system_xy(sys)
    vals = xy.values()
    out = []
    for members in invariant_sets().values():
        out.append(all(not evaluate(p, vals) for p in members))
    return tuple(out)


def dependence_counts(xy: XYTuple, point):
    """(d_X, d_Y): ranks of the coordinate Jacobians of the X and Y blocks at an
    exact point {0: x, 1: y, 2: z}."""
    def jac_rank(funcs):
        e = Echelon(track=False)
        for f in funcs:
            row = Poly()
            for v in range(3):
                val = f.diff(v).evaluate(point)
                if val:
                    row = row + Poly.var(v) * val
            e.add(row)
        return e.rank

    return jac_rank([xy.X[m] for m in (-1, 0, 1)]), jac_rank([xy.Y[m] for m in range(-3, 4)])


__all__ = [
    "DIFFCONDS", "DIRECTIONS", "IDEAL", "XYTuple", "closure_suite", "coordinate_derivative",
    "d_derivatives", "dependence_counts", "eval_identities", "evaluate", "from_xy",
    "identities_hold", "ideal_member", "induced_derivative", "invariant_sets", "ladder_poly",
    "lowered_family", "quad_basis", "real_form", "relative_invariants", "span_equivalence",
    "system_xy", "table_form", "to_d", "to_xy", "translation_derivative", "verify_diffconds",
    "x_module_check", "zw_forms",
]
