"""Sparse multivariate polynomials over Q(i, sqrt2, sqrt3, sqrt5, sqrt7).

Terms are kept in a dict ``key -> rational``.  A key packs a monomial in the
ten registry variables together with one basis element of the coefficient
field, so a polynomial with field coefficients is just a rational linear
combination of keys.  Layout, most significant first::

    | total degree (16) | x | y | z | p1 | p2 | p3 | a | b | c | d | rad (10) |

with 12 bits per exponent and 2 bits for each field generator.  Integer
comparison of keys is graded-lex order on the monomial part, and the product
of two terms is the sum of their keys followed by a reduction of any
generator field that reached 2.
"""
from __future__ import annotations

from gmpy2 import mpq

from .. import _backend as _dispatch
from .field import MULT, NMASK, SQUARES, ExtScalar, ext_inv, _clean

VARS = ("x", "y", "z", "p1", "p2", "p3", "a", "b", "c", "d")
NVARS = len(VARS)
VAR_INDEX = {n: k for k, n in enumerate(VARS)}
EBITS = 12
EMASK = (1 << EBITS) - 1
RBITS = 10
RAD_MASK = (1 << RBITS) - 1
DEG_SHIFT = RBITS + EBITS * NVARS
DEG_ONE = 1 << DEG_SHIFT
SHIFT = tuple(RBITS + EBITS * (NVARS - 1 - v) for v in range(NVARS))
# overflow bit of each 2-bit generator field
HIGH = sum(2 << (2 * r) for r in range(5))

# field mask <-> radical bits of a key
RADKEY = tuple(sum(1 << (2 * r) for r in range(5) if m >> r & 1) for m in range(NMASK))
KEYRAD = {k: m for m, k in enumerate(RADKEY)}


def _high_factor(h):
    f = 1
    for r in range(5):
        if h & (2 << (2 * r)):
            f *= SQUARES[r]
    return f


# reduction table: overflow pattern -> scalar factor
HIGH_FACTOR = {}
for _m in range(NMASK):
    _h = sum(2 << (2 * r) for r in range(5) if _m >> r & 1)
    HIGH_FACTOR[_h] = _high_factor(_h)


def monomial_key(exps):
    """Key for an exponent sequence (length <= 10, registry order)."""
    k = 0
    deg = 0
    for v, e in enumerate(exps):
        if e:
            k |= e << SHIFT[v]
            deg += e
    return k | deg << DEG_SHIFT


def key_exponents(key):
    return tuple((key >> SHIFT[v]) & EMASK for v in range(NVARS))


def key_degree(key):
    return key >> DEG_SHIFT


def var_key(v):
    return DEG_ONE | 1 << SHIFT[v]


def _mul_terms_py(a, b):
    """Product of two term dicts (pure Python)."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    hf = HIGH_FACTOR
    for k2, c2 in b.items():
        for k1, c1 in a.items():
            k = k1 + k2
            c = c1 * c2
            h = k & HIGH
            if h:
                k -= h
                c *= hf[h]
            out[k] = get(k, 0) + c
    return {k: c for k, c in out.items() if c}


def _add_scaled_py(a, b, s):
    """a + s*b for a rational scalar s (new dict)."""
    out = dict(a)
    get = out.get
    for k, c in b.items():
        v = get(k, 0) + s * c
        if v:
            out[k] = v
        else:
            del out[k]
    return out


_dispatch.configure(HIGH, HIGH_FACTOR)
_mul_terms, _add_scaled = _dispatch.pick("mul_terms", _mul_terms_py, "add_scaled", _add_scaled_py)


class Poly:
    """Immutable sparse polynomial.  Construct via the helpers, not the dict."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def const(cls, v):
        if isinstance(v, Poly):
            return v
        if isinstance(v, ExtScalar):
            return cls({RADKEY[m]: c for m, c in v.c.items()})
        if v == 0:
            return cls()
        return cls({0: v})

    @classmethod
    def var(cls, name, power=1):
        v = VAR_INDEX[name] if isinstance(name, str) else name
        if power == 0:
            return cls({0: 1})
        return cls({power * var_key(v): 1})

    @classmethod
    def monomial(cls, exps, coef=1):
        return cls.const(coef) * cls({monomial_key(exps): 1})

    @staticmethod
    def coerce(v):
        if isinstance(v, Poly):
            return v
        return Poly.const(v)

    # -- protocol --------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, ExtScalar)) or hasattr(other, "denominator"):
                other = Poly.const(other)
            else:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        from .printing import format_poly

        return format_poly(self)

    # -- queries ---------------------------------------------------------
    def is_constant(self):
        return all(k <= RAD_MASK for k in self.terms)

    def constant_value(self):
        """The constant term as an ExtScalar."""
        return ExtScalar({KEYRAD[k]: c for k, c in self.terms.items() if k <= RAD_MASK})

    def degree(self):
        return max((k >> DEG_SHIFT for k in self.terms), default=-1)

    def degree_in(self, v):
        s = SHIFT[v]
        return max(((k >> s) & EMASK for k in self.terms), default=-1)

    def variables(self):
        used = 0
        for k in self.terms:
            used |= k
        return [v for v in range(NVARS) if (used >> SHIFT[v]) & EMASK]

    def lead_key(self):
        """Leading monomial (grlex) with the radical bits cleared."""
        return max(self.terms) & ~RAD_MASK

    def coeff(self, mono_key):
        """Field coefficient of the monomial ``mono_key`` (radical bits clear)."""
        t = self.terms
        d = {}
        for m in range(NMASK):
            c = t.get(mono_key | RADKEY[m])
            if c:
                d[m] = c
        return ExtScalar._raw(d)

    def lead_coeff(self):
        return self.coeff(self.lead_key())

    def monomials(self):
        """Distinct monomial keys (radical bits cleared), descending."""
        return sorted({k & ~RAD_MASK for k in self.terms}, reverse=True)

    def coefficients(self):
        """dict monomial key -> ExtScalar."""
        out = {}
        for k, c in self.terms.items():
            out.setdefault(k & ~RAD_MASK, {})[KEYRAD[k & RAD_MASK]] = c
        return {k: ExtScalar._raw(d) for k, d in out.items()}

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = Poly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        return Poly(_add_scaled(self.terms, other.terms, 1))

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = Poly.coerce(other)
        if not other.terms:
            return self
        return Poly(_add_scaled(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.terms or not other.terms:
                return Poly()
            return Poly(_mul_terms(self.terms, other.terms))
        if isinstance(other, ExtScalar):
            return self * Poly.const(other)
        if not other:
            return Poly()
        if other == 1:
            return self
        return Poly({k: c * other for k, c in self.terms.items()})

    __rmul__ = __mul__

    def scale(self, s):
        """Multiply by a rational or field scalar."""
        return self * s

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if other.is_constant():
                other = other.constant_value()
            else:
                raise TypeError("use exact_div or RatFn for polynomial division")
        if isinstance(other, ExtScalar):
            if other.is_rational():
                other = other.rational()
            else:
                return self * ext_inv(other)
        inv = mpq(1) / other
        return Poly({k: _clean(c * inv) for k, c in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly({0: 1})
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def add_scaled(self, other, s):
        """self + s*other for rational s."""
        return Poly(_add_scaled(self.terms, other.terms, s))

    # -- calculus --------------------------------------------------------
    def diff(self, v, times=1):
        if isinstance(v, str):
            v = VAR_INDEX[v]
        s = SHIFT[v]
        p = self
        for _ in range(times):
            dk = (1 << s) + DEG_ONE
            out = {}
            for k, c in p.terms.items():
                e = (k >> s) & EMASK
                if e:
                    out[k - dk] = c * e
            p = Poly(out)
        return p

    # -- substitution / evaluation ----------------------------------------
    def subs(self, mapping):
        """Substitute Polys for variables.  ``mapping``: var index or name -> Poly."""
        mp = {}
        for v, q in mapping.items():
            mp[VAR_INDEX[v] if isinstance(v, str) else v] = Poly.coerce(q)
        if not mp:
            return self
        keep_mask = 0
        for v in range(NVARS):
            if v not in mp:
                keep_mask |= EMASK << SHIFT[v]
        powers = {v: [Poly({0: 1})] for v in mp}

        def pw(v, e):
            lst = powers[v]
            while len(lst) <= e:
                lst.append(lst[-1] * mp[v])
            return lst[e]

        groups = {}
        for k, c in self.terms.items():
            sub = tuple((k >> SHIFT[v]) & EMASK for v in mp)
            groups.setdefault(sub, {})
            kept = k & (keep_mask | RAD_MASK)
            deg = sum(((kept >> SHIFT[v]) & EMASK) for v in range(NVARS) if v not in mp)
            groups[sub][kept | deg << DEG_SHIFT] = c
        out = Poly()
        vs = list(mp)
        for sub, terms in groups.items():
            fac = Poly(terms)
            for v, e in zip(vs, sub):
                if e:
                    fac = fac * pw(v, e)
            out = out + fac
        return out

    def eval_complex(self, values):
        """Evaluate numerically; ``values`` maps var index -> complex."""
        from .field import ExtScalar as _E

        rad = {}
        tot = 0j
        pw = {}
        for k, c in self.terms.items():
            r = k & RAD_MASK
            if r not in rad:
                rad[r] = _E._raw({KEYRAD[r]: 1}).to_complex()
            t = complex(float(c)) * rad[r]
            for v in range(NVARS):
                e = (k >> SHIFT[v]) & EMASK
                if e:
                    key = (v, e)
                    if key not in pw:
                        pw[key] = complex(values[v]) ** e
                    t *= pw[key]
            tot += t
        return tot

    def evaluate(self, values):
        """Exact evaluation; ``values`` maps var index -> ExtScalar/rational.

        Variables not in ``values`` are left symbolic.
        """
        return self.subs({v: Poly.const(ExtScalar._coerce(val)) for v, val in values.items()})

    # -- content -----------------------------------------------------------
    def map_coeffs(self, f):
        return Poly({k: c2 for k, c in self.terms.items() if (c2 := f(c))})


def P(v):
    return Poly.var(v)


def exact_div(p, d):
    """Quotient q with p = q*d, or None if d does not divide p."""
    if not d.terms:
        raise ZeroDivisionError("division by zero polynomial")
    if not p.terms:
        return Poly()
    lk = d.lead_key()
    lc = d.coeff(lk)
    rational_lc = lc.is_rational()
    if rational_lc:
        inv_r = mpq(1) / lc.rational()
    else:
        inv_lc = Poly.const(ext_inv(lc))
    lexp = key_exponents(lk)
    rem = dict(p.terms)
    q = {}
    dterms = d.terms
    while rem:
        top = max(rem) & ~RAD_MASK
        texp = key_exponents(top)
        if any(a < b for a, b in zip(texp, lexp)):
            return None
        mono = top - lk
        # field coefficient of the top monomial of the remainder
        cpoly = {}
        for m in range(NMASK):
            kk = top | RADKEY[m]
            c = rem.get(kk)
            if c:
                cpoly[RADKEY[m]] = c
        if rational_lc:
            qt = {mono | rk: _clean(c * inv_r) for rk, c in cpoly.items()}
        else:
            qt = _mul_terms(cpoly, inv_lc.terms)
            qt = {k + mono: c for k, c in qt.items()}
        for k, c in qt.items():
            q[k] = q.get(k, 0) + c
        rem = _add_scaled(rem, _mul_terms(qt, dterms), -1)
    return Poly({k: c for k, c in q.items() if c})


def monomial_content(p):
    """Key of the largest monomial dividing every term (radical bits clear)."""
    if not p.terms:
        return 0
    mins = None
    for k in p.terms:
        e = [(k >> SHIFT[v]) & EMASK for v in range(NVARS)]
        if mins is None:
            mins = e
        else:
            mins = [min(a, b) for a, b in zip(mins, e)]
        if not any(mins):
            return 0
    return monomial_key(mins)


def divide_monomial(p, mkey):
    if not mkey:
        return p
    return Poly({k - mkey: c for k, c in p.terms.items()})
