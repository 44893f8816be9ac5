"""Independent reference computations.

Everything here goes through sympy or closed-form solutions, never through
the package's own arithmetic, so agreement is a real cross-check.
"""
import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

X, Y, Z, P1, P2, P3, A, B, C, D = sp.symbols("x y z p1 p2 p3 a b c d")
COORDS = (X, Y, Z)
MOMENTA = (P1, P2, P3)
_NAMES = {str(s): s for s in (X, Y, Z, P1, P2, P3, A, B, C, D)}
_NAMES["i"] = sp.I
_TRANSFORMS = standard_transformations + (convert_xor,)


def sym(obj):
    """sympy expression for a grammar string or anything printing in the grammar."""
    return parse_expr(str(obj), local_dict=dict(_NAMES), transformations=_TRANSFORMS)


def is_zero(expr):
    return sp.simplify(sp.expand(sp.together(expr))) == 0


def same(a, b):
    return is_zero(sym(a) - sym(b) if not isinstance(a, sp.Basic) else a - b)


def poisson(f, g):
    return sum(sp.diff(f, q) * sp.diff(g, p) - sp.diff(f, p) * sp.diff(g, q)
               for q, p in zip(COORDS, MOMENTA))


def killing_equations(a):
    """Residuals of the flat Killing equations for a symmetric 3x3 sympy array."""
    d = lambda j, k, v: sp.diff(a[j][k], COORDS[v])  # noqa: E731
    out = [d(i, i, i) for i in range(3)]
    for i in range(3):
        for j in range(3):
            if i != j:
                out.append(2 * d(i, j, i) + d(i, i, j))
    out.append(d(0, 1, 2) + d(2, 0, 1) + d(1, 2, 0))
    return [sp.expand(e) for e in out]


def tensor_of(quadratic):
    """Symmetric coefficient array a^jk of a quadratic form in the momenta."""
    q = sp.expand(quadratic)
    a = [[0] * 3 for _ in range(3)]
    for j in range(3):
        for k in range(3):
            c = sp.diff(q, MOMENTA[j], MOMENTA[k])
            a[j][k] = sp.expand(c / 2)
    return a


def bd_residuals(a, V):
    """Three Bertrand-Darboux residuals for (j, l) = (1,2), (1,3), (2,3)."""
    Vs = [sp.diff(V, c) for c in COORDS]
    out = []
    for j, l in ((0, 1), (0, 2), (1, 2)):
        r = 0
        for s in range(3):
            r += (sp.diff(Vs[s], COORDS[j]) * a[s][l] - sp.diff(Vs[s], COORDS[l]) * a[s][j]
                  + Vs[s] * (sp.diff(a[s][l], COORDS[j]) - sp.diff(a[s][j], COORDS[l])))
        out.append(sp.simplify(sp.together(r)))
    return out


def field_value(e):
    """Exact sympy value of an ExtScalar (via its printed form)."""
    return sp.nsimplify(sym(e)) if str(e) != "0" else sp.Integer(0)


def oscillator(start, a, t):
    """Closed-form solution of x' = 2p, p' = -2a x (H = p^2 + a r^2)."""
    w = 2 * np.sqrt(a)
    x0, p0 = np.asarray(start[:3], dtype=complex), np.asarray(start[3:], dtype=complex)
    t = np.asarray(t)[:, None]
    x = x0 * np.cos(w * t) + (2 * p0 / w) * np.sin(w * t)
    p = p0 * np.cos(w * t) - (w * x0 / 2) * np.sin(w * t)
    return x, p


def spin_matrices(l):
    """Standard (J+, J-, J3) for spin l, rows and columns m = -l..l (sympy)."""
    n = 2 * l + 1
    jp, jm, j3 = sp.zeros(n), sp.zeros(n), sp.zeros(n)
    for m in range(-l, l + 1):
        j3[m + l, m + l] = m
        if m < l:
            jp[m + 1 + l, m + l] = sp.sqrt((l - m) * (l + m + 1))
        if m > -l:
            jm[m - 1 + l, m + l] = sp.sqrt((l + m) * (l - m + 1))
    return jp, jm, j3
