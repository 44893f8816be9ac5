"""Action of the complex Euclidean algebra e(3) on the ten-tuple.

Basis order: P1, P2, P3 (translations), J1, J2, J3 (rotations).  On the X
block (l = 1) and the Y block (l = 3) rotations act through the ladder
operators, J1 = (J+ + J-)/2 and J2 = (J+ - J-)/(2i); a rotation column also
carries the transport of the tuple along the rotational vector field.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import ExtScalar, Poly, RatFn
from .algebra.linalg import as_vector, kernel, rank, rref_rows
from .canonical import extract_from_potential
from .variety import XY_KEYS, XYTuple, to_xy, translation_derivative

I = ExtScalar.gen("i")
BASIS = ("P1", "P2", "P3", "J1", "J2", "J3")
ZERO = ExtScalar()
# the ladder J_k act as -i times the coordinate rotations about the axes, with
# the orientation signs below (the quantization axis is z, the X_{+1} weight
# pairs with x - i*y)
TRANSPORT_SIGN = (-1, 1, -1)
TRANSPORT_PHASE = -I


class WeightOutOfRange(ValueError):
    pass


class SingularPoint(ZeroDivisionError):
    pass


def ladder(l: int, op: str, m: int):
    """(coefficient, new weight) for J_+, J_- or J_3 acting on f_m of spin l.

    A coefficient of zero means the result vanishes."""
    if abs(m) > l:
        raise WeightOutOfRange(f"weight {m} outside spin {l}")
    if op == "J3":
        return ExtScalar(m), m
    if op == "J+":
        n = (l - m) * (l + m + 1)
        return (ExtScalar.sqrt(n) if n else ZERO), m + 1
    if op == "J-":
        n = (l + m) * (l - m + 1)
        return (ExtScalar.sqrt(n) if n else ZERO), m - 1
    raise ValueError(f"unknown operator {op!r}")


def block_matrix(l: int, op: str):
    """(2l+1)x(2l+1) matrix, rows and columns indexed by m = -l..l."""
    n = 2 * l + 1
    M = [[ZERO] * n for _ in range(n)]
    for m in range(-l, l + 1):
        c, m2 = ladder(l, op, m)
        if c:
            M[m2 + l][m + l] = c
    return M


def _rep_matrices():
    """J1, J2, J3 as 10x10 matrices on the XY ordering of ``XY_KEYS``."""
    out = {}
    for op in ("J+", "J-", "J3"):
        M = [[ZERO] * 10 for _ in range(10)]
        for base, l in ((0, 1), (3, 3)):
            B = block_matrix(l, op)
            for r in range(2 * l + 1):
                for c in range(2 * l + 1):
                    M[base + r][base + c] = B[r][c]
        out[op] = M
    half, half_i = ExtScalar(1) / 2, (2 * I).inv()
    J1 = [[(a + b) * half for a, b in zip(ra, rb)] for ra, rb in zip(out["J+"], out["J-"])]
    J2 = [[(a - b) * half_i for a, b in zip(ra, rb)] for ra, rb in zip(out["J+"], out["J-"])]
    return J1, J2, out["J3"], out


def _apply(M, v):
    return [sum((M[r][c] * v[c] for c in range(len(v)) if M[r][c]), ZERO) for r in range(len(M))]


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k) if A[i][t] and B[t][j]), ZERO)
             for j in range(m)] for i in range(n)]


def commutator(A, B):
    AB, BA = matmul(A, B), matmul(B, A)
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(AB, BA)]


@dataclass
class LieElement:
    coeffs: tuple  # six ExtScalars over BASIS

    def __str__(self):
        parts = []
        for c, name in zip(self.coeffs, BASIS):
            if not c:
                continue
            s = str(c)
            if s == "1":
                parts.append(name)
            elif s == "-1":
                parts.append("-" + name)
            else:
                parts.append(f"({s})*{name}" if len(Poly.const(c).terms) > 1 else f"{s}*{name}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def normalized(self):
        lead = next(c for c in self.coeffs if c)
        inv = lead.inv()
        return LieElement(tuple(c * inv for c in self.coeffs))


def parse_point(text: str):
    """"x,y,z" with Gaussian-rational components such as 1/2+3i or -2i."""
    from .algebra import parse_expr

    comps = [c.strip() for c in text.split(",")]
    if len(comps) != 3:
        raise ValueError("a point needs three components")
    out = []
    for c in comps:
        c = c.replace(" ", "")
        expr = c[:-1] + "*i" if c.endswith("i") and c != "i" else c
        expr = expr.replace("+*i", "+i").replace("-*i", "-i")
        if expr.startswith("*i"):
            expr = "i"
        r = parse_expr(expr)
        if r.variables() or not r.is_polynomial():
            raise ValueError(f"not a Gaussian rational: {c!r}")
        out.append(r.num.constant_value() if r.num.terms else ExtScalar())
    return tuple(out)


def _exact_tuple(sys, point):
    V = sys.potential if hasattr(sys, "potential") else RatFn.coerce(sys)
    cc = extract_from_potential(V)
    xy = to_xy(cc)
    pt = {k: ExtScalar._coerce(v) for k, v in enumerate(point)}
    vals = []
    for f in xy.values():
        try:
            v = f.evaluate(pt)
        except ZeroDivisionError:
            raise SingularPoint(f"tuple is singular at {point}") from None
        vals.append(v if isinstance(v, ExtScalar) else ExtScalar._coerce(v))
    return XYTuple.from_values(vals)


def action_matrix(sys, point):
    """10x6 matrix (rows in ``XY_KEYS`` order, columns in ``BASIS`` order)."""
    T = _exact_tuple(sys, point)
    vals = T.values()
    dp = translation_derivative(T, "+").values()
    dm = translation_derivative(T, "-").values()
    dz = translation_derivative(T, "z").values()
    half, half_i = ExtScalar(1) / 2, (2 * I).inv()
    dx = [(a - b) * half for a, b in zip(dp, dm)]
    dy = [(a + b) * half_i for a, b in zip(dp, dm)]
    x, y, z = (ExtScalar._coerce(v) for v in point)
    transport = (
        [y * c - z * b for b, c in zip(dy, dz)],
        [z * a - x * c for a, c in zip(dx, dz)],
        [x * b - y * a for a, b in zip(dx, dy)],
    )
    J = _rep_matrices()[:3]
    cols = [dx, dy, dz]
    for k in range(3):
        rep = _apply(J[k], vals)
        f = TRANSPORT_PHASE * TRANSPORT_SIGN[k]
        cols.append([r + t * f for r, t in zip(rep, transport[k])])
    return [[cols[c][r] for c in range(6)] for r in range(10)]


def isotropy(sys, point):
    """(dimension, basis) of the kernel of the action matrix."""
    M = action_matrix(sys, point)
    cols = [as_vector([M[r][c] for r in range(10)]) for c in range(6)]
    rels = kernel(cols)
    rows = rref_rows(rels, 6)
    basis = [LieElement(tuple(r.get(k, ZERO) for k in range(6))) for r in rows]
    return len(basis), basis


def action_rank(sys, point):
    M = action_matrix(sys, point)
    return rank([as_vector([M[r][c] for r in range(10)]) for c in range(6)])


def contains(basis, element) -> bool:
    """Whether a LieElement lies in the span of ``basis``."""
    vecs = [as_vector(list(b.coeffs)) for b in basis]
    return rank(vecs + [as_vector(list(element.coeffs))]) == rank(vecs)


def element(**coeffs):
    """LieElement from keyword coefficients, e.g. element(J1=1, J2=I)."""
    return LieElement(tuple(ExtScalar._coerce(coeffs.get(n, 0)) for n in BASIS))


__all__ = [
    "BASIS", "LieElement", "SingularPoint", "WeightOutOfRange", "action_matrix", "action_rank",
    "block_matrix", "commutator", "contains", "element", "isotropy", "ladder", "matmul",
    "parse_point",
]
