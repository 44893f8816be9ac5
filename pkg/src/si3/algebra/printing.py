"""Render field elements and polynomials in the input expression syntax."""
from .field import ExtScalar

_PRIMES = (2, 3, 5, 7)


def _basis_str(mask):
    n = 1
    for r, p in enumerate(_PRIMES):
        if mask >> r & 1:
            n *= p
    parts = []
    if n > 1:
        parts.append(f"sqrt({n})")
    if mask & 16:
        parts.append("i")
    return "*".join(parts)


def _signed_terms(e: ExtScalar):
    """List of (negative?, text) pieces for a field element."""
    out = []
    for m in sorted(e.c):
        c = e.c[m]
        neg = c < 0
        a = -c if neg else c
        b = _basis_str(m)
        if not b:
            txt = str(a)
        elif a == 1:
            txt = b
        else:
            txt = f"{a}*{b}"
        out.append((neg, txt))
    return out


def _join(pieces):
    s = ""
    for k, (neg, txt) in enumerate(pieces):
        if k == 0:
            s = ("-" if neg else "") + txt
        else:
            s += (" - " if neg else " + ") + txt
    return s


def format_scalar(e: ExtScalar) -> str:
    if not e.c:
        return "0"
    return _join(_signed_terms(e))


def _mono_str(key):
    from .poly import VARS, key_exponents

    parts = []
    for v, e in enumerate(key_exponents(key)):
        if e == 1:
            parts.append(VARS[v])
        elif e > 1:
            parts.append(f"{VARS[v]}^{e}")
    return "*".join(parts)


def format_poly(p) -> str:
    if not p.terms:
        return "0"
    coeffs = p.coefficients()
    pieces = []
    for mk in sorted(coeffs, reverse=True):
        c = coeffs[mk]
        mono = _mono_str(mk)
        terms = _signed_terms(c)
        if not mono:
            pieces.extend(terms)
            continue
        if len(terms) == 1:
            neg, txt = terms[0]
            if txt == "1":
                pieces.append((neg, mono))
            else:
                pieces.append((neg, f"{txt}*{mono}"))
        else:
            pieces.append((False, f"({_join(terms)})*{mono}"))
    return _join(pieces)
