"""Exact arithmetic in the number field Q(i, sqrt2, sqrt3, sqrt5, sqrt7).

An element is stored sparsely as ``{mask: rational}`` where bit ``r`` of
``mask`` selects the generator ``GENERATORS[r]``.  The basis monomial for a
mask is the product of the selected generators, so the 32 masks give the
full basis over Q.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

from gmpy2 import mpq

GENERATORS = ("sqrt2", "sqrt3", "sqrt5", "sqrt7", "i")
# square of each generator
SQUARES = (2, 3, 5, 7, -1)
I_BIT = 1 << 4
NMASK = 32


class ZeroInverse(ZeroDivisionError):
    """Raised when inverting zero."""


def _square_factor(common):
    f = 1
    for r in range(5):
        if common >> r & 1:
            f *= SQUARES[r]
    return f


# MULT[m] = product of squares of generators in m
MULT = tuple(_square_factor(m) for m in range(NMASK))


def as_rational(v):
    """Coerce ints, Fractions and mpq values to an exact rational (int or mpq)."""
    if isinstance(v, int):
        return v
    if type(v) is type(mpq()):
        return v
    if isinstance(v, (Fraction, _RationalABC)):
        return mpq(v.numerator, v.denominator)
    raise TypeError(f"not an exact rational: {v!r}")


def _clean(q):
    # prefer plain ints when the denominator is 1
    if not isinstance(q, int) and q.denominator == 1:
        return int(q.numerator)
    return q


class ExtScalar:
    __slots__ = ("c",)

    def __init__(self, coords=None):
        if coords is None:
            self.c = {}
        elif isinstance(coords, dict):
            self.c = {m: _clean(as_rational(v)) for m, v in coords.items() if v}
        else:
            v = as_rational(coords)
            self.c = {0: _clean(v)} if v else {}

    @classmethod
    def _raw(cls, d):
        obj = cls.__new__(cls)
        obj.c = d
        return obj

    @classmethod
    def gen(cls, name, coef=1):
        """Generator by name, e.g. ``ExtScalar.gen('i')``."""
        return cls._raw({1 << GENERATORS.index(name): coef})

    @classmethod
    def sqrt(cls, n):
        """Square root of a nonnegative integer whose squarefree part divides 210."""
        if n < 0:
            return cls.sqrt(-n) * cls.gen("i")
        if n == 0:
            return cls()
        coef, mask = 1, 0
        for r, p in enumerate((2, 3, 5, 7)):
            while n % (p * p) == 0:
                n //= p * p
                coef *= p
            if n % p == 0:
                n //= p
                mask |= 1 << r
        if n != 1:
            k = int(n ** 0.5)
            if k * k != n:
                raise ValueError("square root outside the coefficient field")
            coef *= k
        return cls._raw({mask: coef})

    # -- basic protocol --------------------------------------------------
    def __bool__(self):
        return bool(self.c)

    def is_rational(self):
        return not self.c or (len(self.c) == 1 and 0 in self.c)

    def rational(self):
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.c.get(0, 0)

    def __eq__(self, other):
        if not isinstance(other, ExtScalar):
            try:
                other = ExtScalar(other)
            except TypeError:
                return NotImplemented
        return self.c == other.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c.get(0, 0))
        return hash(frozenset(self.c.items()))

    def __repr__(self):
        return f"ExtScalar({self})"

    def __str__(self):
        from .poly import Poly  # printing is shared with polynomials

        return str(Poly.const(self))

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(v):
        if isinstance(v, ExtScalar):
            return v
        return ExtScalar(v)

    def __add__(self, other):
        other = self._coerce(other)
        d = dict(self.c)
        for m, v in other.c.items():
            s = d.get(m, 0) + v
            if s:
                d[m] = s
            else:
                d.pop(m, None)
        return ExtScalar._raw(d)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar._raw({m: -v for m, v in self.c.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ExtScalar):
            try:
                v = as_rational(other)
            except TypeError:
                return NotImplemented
            if not v:
                return ExtScalar()
            return ExtScalar._raw({m: c * v for m, c in self.c.items()})
        d = {}
        for m1, c1 in self.c.items():
            for m2, c2 in other.c.items():
                m = m1 ^ m2
                v = d.get(m, 0) + c1 * c2 * MULT[m1 & m2]
                if v:
                    d[m] = v
                else:
                    d.pop(m, None)
        return ExtScalar._raw(d)

    __rmul__ = __mul__

    def conj(self, r):
        """Galois conjugate flipping the sign of generator ``r``."""
        bit = 1 << r
        return ExtScalar._raw({m: (-v if m & bit else v) for m, v in self.c.items()})

    def complex_conj(self):
        return self.conj(4)

    def inv(self):
        return ext_inv(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * ext_inv(other)

    def __rtruediv__(self, other):
        return self._coerce(other) * ext_inv(self)

    def __pow__(self, n):
        if n < 0:
            return ext_inv(self) ** (-n)
        out = ExtScalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def to_complex(self):
        vals = (2 ** 0.5, 3 ** 0.5, 5 ** 0.5, 7 ** 0.5)
        tot = 0j
        for m, v in self.c.items():
            f = complex(float(v))
            for r in range(4):
                if m >> r & 1:
                    f *= vals[r]
            if m & I_BIT:
                f *= 1j
            tot += f
        return tot

    __complex__ = to_complex


ZERO = ExtScalar()
ONE = ExtScalar(1)
I = ExtScalar.gen("i")


def ext_mul(a, b):
    return ExtScalar._coerce(a) * b


def ext_inv(a):
    """Multiplicative inverse via successive Galois norms.

    Multiplying by the conjugate that flips one generator removes that
    generator from the product; after five steps the product is rational.
    """
    a = ExtScalar._coerce(a)
    if not a.c:
        raise ZeroInverse("inverse of zero")
    if a.is_rational():
        return ExtScalar._raw({0: _clean(mpq(1) / a.c[0])})
    if len(a.c) == 1:
        (m, v), = a.c.items()
        # e_m * e_m = MULT[m]
        return ExtScalar._raw({m: _clean(mpq(1) / (v * MULT[m]))})
    num = ExtScalar(1)
    cur = a
    for r in range(5):
        if any(m >> r & 1 for m in cur.c):
            cj = cur.conj(r)
            num = num * cj
            cur = cur * cj
    n = cur.rational()
    return ExtScalar._raw({m: _clean(mpq(v) / n) for m, v in num.c.items()})


def inv_by_matrix(a):
    """Inverse obtained by solving the 32x32 rational system of x -> a*x.

    Slow; kept as an independent check of :func:`ext_inv`.
    """
    a = ExtScalar._coerce(a)
    if not a.c:
        raise ZeroInverse("inverse of zero")
    # column j is a * e_j
    rows = [[mpq(0)] * (NMASK + 1) for _ in range(NMASK)]
    for j in range(NMASK):
        for m, v in a.c.items():
            rows[m ^ j][j] += v * MULT[m & j]
    rows[0][NMASK] = mpq(1)
    n = NMASK
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col])
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [u - f * w for u, w in zip(rows[r], rows[col])]
    return ExtScalar({m: rows[m][NMASK] for m in range(NMASK)})
