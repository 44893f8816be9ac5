"""Canonical second-derivative system of a nondegenerate potential.

    V_22 = V_11 + A22 V_1 + B22 V_2 + C22 V_3
    V_33 = V_11 + A33 V_1 + B33 V_2 + C33 V_3
    V_ij = Aij V_1 + Bij V_2 + Cij V_3          (i < j)

Every derivative of V of order >= 2 reduces to a combination of the frame
(V_1, V_2, V_3, V_11) with rational coefficients.
"""
from __future__ import annotations

from itertools import combinations

from .algebra import Poly, RatFn
from .algebra.poly import exact_div
from .mechanics import COORDS, KillingTensor, Symmetry, split_parameters

INDEPENDENT = ("A12", "A13", "A22", "A23", "A33", "B12", "B22", "B23", "B33", "C33")
EQUATIONS = ((1, 2), (1, 3), (2, 3), (2, 2), (3, 3))


class NoSolution(ValueError):
    pass


class Underdetermined(ValueError):
    pass


class RankDeficient(ValueError):
    pass


class RankExcess(ValueError):
    def __init__(self, msg, conditions=()):
        super().__init__(msg)
        self.conditions = list(conditions)


class ReductionCycle(RuntimeError):
    pass


_Z = RatFn(Poly())


def _key(letter, i, j):
    i, j = min(i, j), max(i, j)
    return f"{letter}{i}{j}"


class CanonCoeffs:
    """The ten independent coefficient functions; the other five follow from
    the linear relations C12 = A23 = B13, C13 = B12 - A22 + A33,
    C22 = B23 - A13, C23 = A12 + B33."""

    __slots__ = ("c",)

    def __init__(self, values=None):
        values = values or {}
        self.c = {k: RatFn.coerce(values.get(k, 0)) for k in INDEPENDENT}

    def get(self, letter, i, j):
        k = _key(letter, i, j)
        if k in self.c:
            return self.c[k]
        c = self.c
        if k in ("C12", "B13"):
            return c["A23"]
        if k == "C13":
            return c["B12"] - c["A22"] + c["A33"]
        if k == "C22":
            return c["B23"] - c["A13"]
        if k == "C23":
            return c["A12"] + c["B33"]
        raise KeyError(k)

    def __getitem__(self, k):
        return self.get(k[0], int(k[1]), int(k[2]))

    def row(self, eq):
        """(A, B, C) of one canonical equation."""
        i, j = eq
        return tuple(self.get(L, i, j) for L in "ABC")

    def all15(self):
        return {_key(L, i, j): self.get(L, i, j) for (i, j) in EQUATIONS for L in "ABC"}

    def is_zero(self):
        return all(v.is_zero() for v in self.c.values())

    def __eq__(self, other):
        return isinstance(other, CanonCoeffs) and all(self.c[k] == other.c[k] for k in INDEPENDENT)

    __hash__ = None

    def __repr__(self):
        return "CanonCoeffs(" + ", ".join(f"{k}={v}" for k, v in self.c.items()) + ")"


def _lhs(V, eq):
    i, j = eq
    if i == j:
        return V.diff(i - 1).diff(i - 1) - V.diff(0).diff(0)
    return V.diff(i - 1).diff(j - 1)


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _size(r):
    return len(r.num.terms) + sum(len(f.terms) * e for f, e in r.factors.items())


def extract_from_potential(V) -> CanonCoeffs:
    """Solve the five canonical equations for their coefficients.

    Each equation is linear in (A, B, C); matching the parameter components of
    V gives four rows, three of which determine the unknowns (Cramer) and the
    remaining rows, plus the parameter-free part, must then be satisfied.
    """
    comps = split_parameters(V)
    parts = [RatFn.coerce(v) for p, v in comps.items() if p is not None]
    free = comps.get(None)
    if len(parts) < 3:
        raise Underdetermined("fewer than three parameter components")
    grads = [[v.diff(k) for k in COORDS] for v in parts]
    # the best nonsingular 3x3 minor of the parameter gradients
    best = None
    for rows in combinations(range(len(parts)), 3):
        m = [grads[r] for r in rows]
        det = _det3(m)
        if det.is_zero():
            continue
        if best is None or _size(det) < best[0]:
            best = (_size(det), rows, det)
    if best is None:
        raise Underdetermined("parameter gradients are linearly dependent")
    _, rows, det = best
    m = [grads[r] for r in rows]
    out = {}
    for eq in EQUATIONS:
        rhs = [_lhs(parts[r], eq) for r in rows]
        sol = []
        for col in range(3):
            mc = [[rhs[r] if c == col else m[r][c] for c in range(3)] for r in range(3)]
            sol.append(_det3(mc) / det)
        for L, s in zip("ABC", sol):
            out[_key(L, *eq)] = s
        checks = [(parts[r], grads[r]) for r in range(len(parts)) if r not in rows]
        if free is not None:
            checks.append((free, [free.diff(k) for k in COORDS]))
        for v, g in checks:
            if _lhs(v, eq) != sol[0] * g[0] + sol[1] * g[1] + sol[2] * g[2]:
                raise NoSolution(f"equation {eq} is not satisfied by every parameter component")
    cc = CanonCoeffs({k: out[k] for k in INDEPENDENT})
    for k, v in out.items():
        if cc[k] != v:
            raise NoSolution(f"linear relation for {k} fails")
    return cc


def check_canonical_equations(cc: CanonCoeffs, V) -> bool:
    """True iff V's actual derivatives satisfy the five equations."""
    V = RatFn.coerce(V)
    g = [V.diff(k) for k in COORDS]
    for eq in EQUATIONS:
        A, B, C = cc.row(eq)
        if _lhs(V, eq) != A * g[0] + B * g[1] + C * g[2]:
            return False
    return True


# -- from a symmetry basis -----------------------------------------------------

# second derivatives V_sj in terms of u = (V22-V11, V33-V11, V12, V13, V23)
# and V11: entry -> (unknown index or None, has V11)
def _second(s, j):
    s, j = min(s, j), max(s, j)
    if s == j:
        return {0: None, 1: 0, 2: 1}[s], True
    return {(0, 1): 2, (0, 2): 3, (1, 2): 4}[(s, j)], False


def _bd_rows(t: KillingTensor):
    """BD equations of one tensor as rows (coef of u_0..u_4 | coef of V_1..V_3)."""
    rows = []
    for j, l in ((0, 1), (0, 2), (1, 2)):
        row = [Poly() for _ in range(8)]
        for s in COORDS:
            for (a, b, sign, ten) in ((s, j, 1, t[s, l]), (s, l, -1, t[s, j])):
                if not ten:
                    continue
                u, _ = _second(a, b)
                if u is not None:
                    row[u] = row[u] + ten * sign
                # the V11 contributions cancel between the two terms
            d = t[s, l].diff(j) - t[s, j].diff(l)
            if d:
                row[5 + s] = row[5 + s] + d
        rows.append(row)
    return rows


def _bareiss(rows, ncols):
    """Fraction-free elimination on the first ncols columns.

    Returns (pivot rows in order, pivot columns, leftover rows).
    """
    rows = [list(r) for r in rows]
    prev = Poly({0: 1})
    done, pcols = [], []
    for col in range(ncols):
        cands = [r for r in rows if r[col]]
        if not cands:
            continue
        piv = min(cands, key=lambda r: len(r[col].terms))
        rows.remove(piv)
        p = piv[col]
        new = []
        for r in rows:
            out = []
            for k in range(len(r)):
                v = r[k] * p - piv[k] * r[col]
                if v:
                    q = exact_div(v, prev)
                    if q is None:
                        raise ArithmeticError("inexact Bareiss division")
                    v = q
                out.append(v)
            new.append(out)
        rows = new
        done.append(piv)
        pcols.append(col)
        prev = p
    return done, pcols, rows


def extract_from_symmetries(syms) -> CanonCoeffs:
    """Canonical coefficients from the BD equations of a symmetry basis.

    The equations are linear in the five second-derivative combinations
    (V22 - V11, V33 - V11, V12, V13, V23); a rank-5 system fixes each of them
    as a combination of V_1, V_2, V_3.
    """
    rows = []
    for s in syms:
        t = s.tensor if isinstance(s, Symmetry) else s
        rows.extend(_bd_rows(t))
    rows = [r for r in rows if any(r)]
    piv, pcols, rest = _bareiss(rows, 5)
    if len(pcols) < 5:
        raise RankDeficient(f"BD system has rank {len(pcols)} < 5")
    extra = [r[5:] for r in rest if any(r[5:])]
    if extra:
        conds = [tuple(RatFn(v) for v in e) for e in extra]
        raise RankExcess("BD system forces first-order conditions on V", conds)
    # back substitution: row k reads sum_c M[k][c] u_c + sum_q N[k][q] V_q = 0
    u = [None] * 5
    for k in range(4, -1, -1):
        r = piv[k]
        col = pcols[k]
        acc = [RatFn(-r[5 + q]) for q in range(3)]
        for c in range(col + 1, 5):
            if r[c]:
                for q in range(3):
                    acc[q] = acc[q] - u[c][q] * r[c]
        d = RatFn(r[col])
        u[col] = [a / d for a in acc]
    names = {0: (2, 2), 1: (3, 3), 2: (1, 2), 3: (1, 3), 4: (2, 3)}
    vals = {}
    for k, eq in names.items():
        for L, v in zip("ABC", u[k]):
            vals[_key(L, *eq)] = v
    cc = CanonCoeffs({k: vals[k] for k in INDEPENDENT})
    for k, v in vals.items():
        if cc[k] != v:
            raise RankExcess(f"linear relation for {k} fails", ())
    return cc


# -- reduction to the frame (V_1, V_2, V_3, V_11) --------------------------------

class Reducer:
    """Memoized reduction of partial derivatives of V to the frame."""

    def __init__(self, cc: CanonCoeffs):
        self.cc = cc
        self.memo = {}
        self._active = set()

    def form(self, m):
        m = tuple(m)
        if sum(m) < 1:
            raise ValueError("multiindex must have order >= 1")
        if m in self.memo:
            return self.memo[m]
        if m in self._active:
            raise ReductionCycle(f"cycle at {m}")
        self._active.add(m)
        try:
            f = self._compute(m)
        finally:
            self._active.discard(m)
        self.memo[m] = f
        return f

    def _compute(self, m):
        n = sum(m)
        if n == 1:
            f = [_Z] * 4
            f[m.index(1)] = RatFn(Poly({0: 1}))
            return tuple(f)
        if n == 2:
            idx = [k for k in range(3) for _ in range(m[k])]
            i, j = idx[0] + 1, idx[1] + 1
            if i == j == 1:
                return (_Z, _Z, _Z, RatFn(Poly({0: 1})))
            A, B, C = self.cc.row((i, j))
            return (A, B, C, RatFn(Poly({0: 1})) if i == j else _Z)
        if m == (3, 0, 0):
            # V_111 = d_2 V_12 - d_1 (V_22 - V_11)
            a = self.diff_form(self.form((1, 1, 0)), 1)
            b = self.diff_form(self._eq_rhs((2, 2)), 0)
            return tuple(x - y for x, y in zip(a, b))
        if n == 3:
            v, base = self._route(m)
            return self.diff_form(self.form(base), v)
        v = max(k for k in range(3) if m[k])
        base = list(m)
        base[v] -= 1
        return self.diff_form(self.form(tuple(base)), v)

    @staticmethod
    def _route(m):
        # third order: differentiate a mixed second derivative when possible
        for v in range(3):
            if m[v]:
                b = list(m)
                b[v] -= 1
                if max(b) == 1:
                    return v, tuple(b)
        # pure V_222, V_333: use d_v (V_vv), whose V_11 part is V_11v
        v = max(range(3), key=lambda k: m[k])
        b = list(m)
        b[v] -= 1
        return v, tuple(b)

    def _eq_rhs(self, eq):
        A, B, C = self.cc.row(eq)
        return (A, B, C, _Z)

    def diff_form(self, f, v):
        """d/dx_v of sum f_k w_k."""
        out = [c.diff(v) for c in f]
        for k, c in enumerate(f):
            if c.is_zero():
                continue
            if k < 3:
                e = [0, 0, 0]
                e[k] += 1
                e[v] += 1
            else:
                e = [2, 0, 0]
                e[v] += 1
            g = self.form(tuple(e))
            out = [o + c * gk for o, gk in zip(out, g)]
        return tuple(out)

    def via(self, m, v):
        """Reduce m as d_v applied to the reduction of m - e_v."""
        base = list(m)
        base[v] -= 1
        return self.diff_form(self.form(tuple(base)), v)

    def matrix(self, j):
        """A^(j) with d_j w = A^(j) w (j = 0, 1, 2)."""
        rows = []
        for k in range(3):
            e = [0, 0, 0]
            e[k] += 1
            e[j] += 1
            rows.append(list(self.form(tuple(e))))
        e = [2, 0, 0]
        e[j] += 1
        rows.append(list(self.form(tuple(e))))
        return rows


def reduce_derivative(cc: CanonCoeffs, multiindex):
    """d^multiindex V as (c1, c2, c3, c11) over (V_1, V_2, V_3, V_11)."""
    if sum(multiindex) < 2:
        raise ValueError("multiindex must have order >= 2")
    return Reducer(cc).form(tuple(multiindex))


def frame_matrices(cc: CanonCoeffs):
    r = Reducer(cc)
    return [r.matrix(j) for j in range(3)]


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(4)), _Z) for j in range(4)] for i in range(4)]


def integrability_residuals(cc: CanonCoeffs):
    """A^(j)_i - A^(i)_j - [A^(i), A^(j)] for i < j, entrywise."""
    Ms = frame_matrices(cc)
    out = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        Ai, Aj = Ms[i], Ms[j]
        ab, ba = _matmul(Ai, Aj), _matmul(Aj, Ai)
        out[(i + 1, j + 1)] = [
            [Aj[r][c].diff(i) - Ai[r][c].diff(j) - (ab[r][c] - ba[r][c]) for c in range(4)]
            for r in range(4)]
    return out


def integrability_ok(cc: CanonCoeffs) -> bool:
    for mat in integrability_residuals(cc).values():
        for row in mat:
            if any(not e.is_zero() for e in row):
                return False
    return True
