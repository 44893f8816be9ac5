"""Rational functions with factored, monic denominators.

No multivariate gcd is ever computed.  The denominator is kept as a product
of monic factors with multiplicities; factors are whatever polynomials were
divided by (single variables are split off automatically).  After each
operation the numerator is trial-divided by the known factors, which is
enough to keep the expressions met here small.  Equality is decided by
cross-multiplication over the common denominator.
"""
from __future__ import annotations

from .field import ExtScalar, ext_inv
from .poly import (
    DEG_ONE,
    EMASK,
    NVARS,
    SHIFT,
    VAR_INDEX,
    Poly,
    exact_div,
    key_exponents,
    monomial_content,
    divide_monomial,
    var_key,
)

_ONE = Poly({0: 1})


def _monic(f):
    """(c, f/c) with f/c having leading coefficient 1."""
    lc = f.lead_coeff()
    if lc == 1:
        return ExtScalar(1), f
    return lc, f * ext_inv(lc)


def _split_denominator(d: Poly):
    """Factor a polynomial as const * prod(var^e) * rest (rest monic)."""
    if d.is_zero():
        raise ZeroDivisionError("zero denominator")
    facs = {}
    mk = monomial_content(d)
    if mk:
        for v, e in enumerate(key_exponents(mk)):
            if e:
                facs[Poly({var_key(v): 1})] = e
        d = divide_monomial(d, mk)
    if d.is_constant():
        return d.constant_value(), facs
    c, rest = _monic(d)
    facs[rest] = facs.get(rest, 0) + 1
    return c, facs


def _is_var(f):
    return len(f.terms) == 1


def _var_of(f):
    (k,) = f.terms
    e = key_exponents(k)
    return e.index(1)


def _prod(facs):
    out = _ONE
    for f, e in facs.items():
        if e:
            out = out * f ** e
    return out


class RatFn:
    """num / prod(f^e for f, e in factors)."""

    __slots__ = ("num", "factors", "_den")

    def __init__(self, num, den=None):
        num = Poly.coerce(num) if not isinstance(num, RatFn) else num
        if isinstance(num, RatFn):
            if den is not None:
                raise TypeError("RatFn(RatFn, den) not supported")
            self.num, self.factors, self._den = num.num, num.factors, num._den
            return
        if den is None:
            self.num, self.factors, self._den = num, {}, _ONE
            return
        den = Poly.coerce(den)
        c, facs = _split_denominator(den)
        if c != 1:
            num = num * ext_inv(c)
        self._set(num, facs)

    @classmethod
    def _make(cls, num, facs):
        obj = cls.__new__(cls)
        obj._set(num, facs)
        return obj

    def _set(self, num, facs):
        facs = {f: e for f, e in facs.items() if e}
        if num.is_zero():
            self.num, self.factors, self._den = num, {}, _ONE
            return
        if facs:
            num, facs = _cancel(num, facs)
        self.num = num
        self.factors = facs
        self._den = None

    # -- accessors -------------------------------------------------------
    @property
    def den(self):
        if self._den is None:
            self._den = _prod(self.factors)
        return self._den

    def is_polynomial(self):
        return not self.factors

    def to_poly(self):
        if self.factors:
            raise ValueError("not a polynomial")
        return self.num

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def coerce(v):
        if isinstance(v, RatFn):
            return v
        return RatFn(Poly.coerce(v))

    def __add__(self, other):
        other = RatFn.coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.factors == other.factors:
            return RatFn._make(self.num + other.num, dict(self.factors))
        lcm = dict(self.factors)
        for f, e in other.factors.items():
            if lcm.get(f, 0) < e:
                lcm[f] = e
        n1 = self.num * _prod({f: e - self.factors.get(f, 0) for f, e in lcm.items()})
        n2 = other.num * _prod({f: e - other.factors.get(f, 0) for f, e in lcm.items()})
        return RatFn._make(n1 + n2, lcm)

    __radd__ = __add__

    def __neg__(self):
        return RatFn._make(-self.num, dict(self.factors))

    def __sub__(self, other):
        return self + (-RatFn.coerce(other))

    def __rsub__(self, other):
        return RatFn.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (Poly, RatFn)):
            other = RatFn.coerce(other)
            facs = dict(self.factors)
            for f, e in other.factors.items():
                facs[f] = facs.get(f, 0) + e
            return RatFn._make(self.num * other.num, facs)
        # scalar
        return RatFn._make(self.num * other, dict(self.factors))

    __rmul__ = __mul__

    @classmethod
    def from_factors(cls, num, facs):
        """num / prod(f^e); factors need not be monic or irreducible."""
        num = Poly.coerce(num)
        out = {}
        for f, e in facs.items():
            c, parts = _split_denominator(Poly.coerce(f))
            if c != 1:
                num = num * ext_inv(c ** e)
            for g, k in parts.items():
                out[g] = out.get(g, 0) + k * e
        return cls._make(num, out)

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        c, facs = _split_denominator(self.num)
        num = _prod(self.factors) * ext_inv(c)
        return RatFn._make(num, facs)

    def __truediv__(self, other):
        if isinstance(other, (Poly, RatFn)):
            return self * RatFn.coerce(other).inverse()
        if isinstance(other, ExtScalar):
            return self * ext_inv(other)
        return self * ext_inv(ExtScalar(other))

    def __rtruediv__(self, other):
        return RatFn.coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        num = self.num ** n
        return RatFn._make(num, {f: e * n for f, e in self.factors.items()})

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RatFn):
            try:
                other = RatFn.coerce(other)
            except TypeError:
                return NotImplemented
        return ratfn_eq(self, other)

    __hash__ = None

    # -- calculus --------------------------------------------------------
    def diff(self, v, times=1):
        if isinstance(v, str):
            v = VAR_INDEX[v]
        r = self
        for _ in range(times):
            r = r._diff1(v)
        return r

    def _diff1(self, v):
        if not self.factors:
            return RatFn._make(self.num.diff(v), {})
        dep = {f: e for f, e in self.factors.items() if f.degree_in(v) > 0}
        if not dep:
            return RatFn._make(self.num.diff(v), dict(self.factors))
        # d(n/prod f^e) = (n' * F - n * sum e f' F/f) / (D * F), F = prod dep f
        F = _prod({f: 1 for f in dep})
        acc = self.num.diff(v) * F
        for f, e in dep.items():
            others = _prod({g: 1 for g in dep if g is not f})
            acc = acc - self.num * (f.diff(v) * others) * e
        facs = dict(self.factors)
        for f in dep:
            facs[f] += 1
        return RatFn._make(acc, facs)

    # -- substitution / evaluation ------------------------------------------
    def subs(self, mapping):
        num = RatFn(self.num.subs(mapping))
        for f, e in self.factors.items():
            num = num / RatFn(f.subs(mapping)) ** e
        return num

    def evaluate(self, values):
        """Exact value at a point; values maps every occurring var -> scalar."""
        n = self.num.evaluate(values)
        d = self.den.evaluate(values)
        if not n.is_constant() or not d.is_constant():
            return RatFn(n, d)
        dv = d.constant_value()
        if not dv:
            raise ZeroDivisionError("denominator vanishes at the point")
        return n.constant_value() / dv

    def eval_complex(self, values):
        return self.num.eval_complex(values) / self.den.eval_complex(values)

    def variables(self):
        vs = set(self.num.variables())
        for f in self.factors:
            vs.update(f.variables())
        return sorted(vs)

    def __repr__(self):
        return f"RatFn({self})"

    def __str__(self):
        if not self.factors:
            return str(self.num)
        parts = []
        for f, e in sorted(self.factors.items(), key=lambda t: (t[0].degree(), str(t[0]))):
            s = str(f)
            if not _is_var(f):
                s = f"({s})"
            parts.append(s if e == 1 else f"{s}^{e}")
        den = "*".join(parts)
        if len(parts) > 1:
            den = f"({den})"
        num = str(self.num)
        if len(self.num.terms) > 1 or num.startswith("-"):
            num = f"({num})"
        return f"{num}/{den}"


def _cancel(num, facs):
    """Strip factors of the denominator that divide the numerator."""
    facs = dict(facs)
    # variable factors: compare exponents directly
    mk = monomial_content(num)
    if mk:
        exps = key_exponents(mk)
        take = [0] * NVARS
        for f, e in facs.items():
            if _is_var(f):
                v = _var_of(f)
                t = min(e, exps[v])
                if t:
                    take[v] = t
                    facs[f] = e - t
        if any(take):
            k = 0
            for v, t in enumerate(take):
                k += t * ((1 << SHIFT[v]) + DEG_ONE)
            num = divide_monomial(num, k)
    for f in list(facs):
        if _is_var(f):
            continue
        while facs[f]:
            q = exact_div(num, f)
            if q is None:
                break
            num = q
            facs[f] -= 1
    return num, {f: e for f, e in facs.items() if e}


def common_denominator(items):
    """(lcm factor dict, numerators) with items[k] = nums[k] / prod(lcm)."""
    items = [RatFn.coerce(r) for r in items]
    lcm = {}
    for r in items:
        for f, e in r.factors.items():
            if lcm.get(f, 0) < e:
                lcm[f] = e
    nums = []
    for r in items:
        nums.append(r.num * _prod({f: e - r.factors.get(f, 0) for f, e in lcm.items()}))
    return lcm, nums


def ratfn_eq(r, s):
    r, s = RatFn.coerce(r), RatFn.coerce(s)
    if r.factors == s.factors:
        return r.num == s.num
    _, (a, b) = common_denominator([r, s])
    return a == b


def zero_test(r):
    return RatFn.coerce(r).num.is_zero()
