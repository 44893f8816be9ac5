# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the sparse polynomial term kernels.

Keys are Python ints and coefficients gmpy2 rationals, so the gain comes
from typed loops over the dicts rather than from machine arithmetic.
"""

cdef object _HIGH = 0
cdef dict _FACTORS = {}


def configure(high, factors):
    """Install the generator-overflow mask and its reduction factors."""
    global _HIGH, _FACTORS
    _HIGH = high
    _FACTORS = dict(factors)


def mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef object k1, k2, c1, c2, k, c, h, prev
    if len(a) < len(b):
        a, b = b, a
    for k2, c2 in b.items():
        for k1, c1 in a.items():
            k = k1 + k2
            c = c1 * c2
            h = k & _HIGH
            if h:
                k = k - h
                c = c * _FACTORS[h]
            prev = out.get(k)
            out[k] = c if prev is None else prev + c
    return {k: c for k, c in out.items() if c}


def add_scaled(dict a, dict b, s):
    cdef dict out = dict(a)
    cdef object k, c, v, prev
    for k, c in b.items():
        prev = out.get(k)
        v = s * c if prev is None else prev + s * c
        if v:
            out[k] = v
        else:
            del out[k]
    return out
