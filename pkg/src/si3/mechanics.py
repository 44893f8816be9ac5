"""Phase-space algebra: Poisson brackets, Killing tensors, Bertrand-Darboux
conditions, scalar-part reconstruction and the quadratic algebra.

Coordinates are x, y, z with momenta p1, p2, p3; the Hamiltonian is
H = p1^2 + p2^2 + p3^2 + V.  Potentials are linear in the parameters a, b,
c, d, so every condition that must hold for all parameter values is imposed
on each parameter component separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement

from .algebra import ExtScalar, Poly, RatFn
from .algebra.linalg import Echelon, kernel, rref_rows
from .algebra.poly import DEG_ONE, DEG_SHIFT, EMASK, SHIFT, key_exponents, monomial_key
from .algebra.ratfn import common_denominator

X, Y, Z = 0, 1, 2
COORDS = (0, 1, 2)
MOMENTA = (3, 4, 5)
PARAMS = (6, 7, 8, 9)
PAIRS = ((0, 1), (0, 2), (1, 2))
ENTRIES = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


class NonIntegrableTerm(ValueError):
    """The gradient cannot be integrated inside the ansatz (e.g. needs a log)."""


class DegenerateInput(ValueError):
    """The potential admits more second-order symmetries than a nondegenerate one."""

    def __init__(self, msg, dimension=None, basis=None):
        super().__init__(msg)
        self.dimension = dimension
        self.basis = basis


class RepresentationNotFound(ArithmeticError):
    pass


def _v(i):
    return Poly.var(i)


# -- brackets ------------------------------------------------------------------

def poisson(f, g):
    """{f, g} = sum_j f_{x_j} g_{p_j} - f_{p_j} g_{x_j}."""
    f, g = RatFn.coerce(f), RatFn.coerce(g)
    out = RatFn(Poly())
    for q, p in zip(COORDS, MOMENTA):
        out = out + f.diff(q) * g.diff(p) - f.diff(p) * g.diff(q)
    return out


def hamiltonian(V):
    return RatFn(_v(3) ** 2 + _v(4) ** 2 + _v(5) ** 2) + RatFn.coerce(V)


def angular_momenta():
    """(J1, J2, J3) = (y p3 - z p2, z p1 - x p3, x p2 - y p1)."""
    x, y, z, p1, p2, p3 = (_v(k) for k in range(6))
    return (y * p3 - z * p2, z * p1 - x * p3, x * p2 - y * p1)


# -- Killing tensors -----------------------------------------------------------

class KillingTensor:
    """Symmetric 3x3 array of polynomials in x, y, z."""

    __slots__ = ("a",)

    def __init__(self, entries=None):
        a = {}
        if entries:
            for (j, k), v in entries.items():
                if j > k:
                    j, k = k, j
                a[(j, k)] = Poly.coerce(v)
        self.a = {e: a.get(e, Poly()) for e in ENTRIES}

    def __getitem__(self, jk):
        j, k = jk
        return self.a[(j, k) if j <= k else (k, j)]

    @classmethod
    def from_quadratic(cls, q):
        """Read a^jk off a form sum a^jk p_j p_k (given as Poly or RatFn)."""
        q = RatFn.coerce(q).to_poly()
        ent = {e: Poly() for e in ENTRIES}
        for key, c in q.coefficients().items():
            ex = key_exponents(key)
            if sum(ex[3:6]) != 2 or any(ex[6:]):
                raise ValueError("not a pure quadratic form in the momenta")
            j, k = [m for m in range(3) for _ in range(ex[3 + m])]
            if j != k:
                c = c / 2
            ent[(j, k)] = ent[(j, k)] + Poly.const(c) * Poly({monomial_key(ex[:3]): 1})
        return cls(ent)

    def quadratic(self):
        out = Poly()
        for (j, k), v in self.a.items():
            if v:
                term = v * _v(3 + j) * _v(3 + k)
                out = out + (term if j == k else term * 2)
        return out

    def __add__(self, other):
        return KillingTensor({e: self.a[e] + other.a[e] for e in ENTRIES})

    def __sub__(self, other):
        return KillingTensor({e: self.a[e] - other.a[e] for e in ENTRIES})

    def scale(self, c):
        return KillingTensor({e: self.a[e] * c for e in ENTRIES})

    def is_zero(self):
        return all(v.is_zero() for v in self.a.values())

    def __eq__(self, other):
        return isinstance(other, KillingTensor) and self.a == other.a

    def __repr__(self):
        return f"KillingTensor({self.quadratic()})"


def identity_tensor():
    return KillingTensor({(0, 0): 1, (1, 1): 1, (2, 2): 1})


def killing_form(t: KillingTensor) -> Poly:
    """Cubic form sum_l (a^jk)_l p_l p_j p_k; zero iff t is a Killing tensor."""
    out = Poly()
    for (j, k), v in t.a.items():
        if not v:
            continue
        mult = 1 if j == k else 2
        for l in COORDS:
            dv = v.diff(l)
            if dv:
                out = out + dv * _v(3 + l) * _v(3 + j) * _v(3 + k) * mult
    return out


def is_killing(t: KillingTensor) -> bool:
    return killing_form(t).is_zero()


@dataclass
class Symmetry:
    tensor: KillingTensor
    w: RatFn | None = None
    label: str = ""

    def phase(self):
        q = RatFn(self.tensor.quadratic())
        return q + self.w if self.w is not None else q


# -- potentials ----------------------------------------------------------------

def split_parameters(V):
    """Split V = V0 + sum_p theta_p V_p; returns {None: V0, p: V_p} (nonzero parts)."""
    V = RatFn.coerce(V)
    for f in V.factors:
        if any(f.degree_in(p) > 0 for p in PARAMS):
            raise ValueError("parameters may not appear in denominators")
    groups = {}
    for key, c in V.num.terms.items():
        pe = [(key >> SHIFT[p]) & EMASK for p in PARAMS]
        tot = sum(pe)
        if tot > 1:
            raise ValueError("potential must be linear in the parameters")
        which = PARAMS[pe.index(1)] if tot else None
        if which is not None:
            key -= (1 << SHIFT[which]) + DEG_ONE
        groups.setdefault(which, {})[key] = c
    out = {}
    for p in (None,) + PARAMS:
        if p in groups:
            out[p] = RatFn._make(Poly(groups[p]), dict(V.factors))
    return out


def _grad(V):
    return [V.diff(q) for q in COORDS]


def bd_residuals(t: KillingTensor, V):
    """The three Bertrand-Darboux residuals for the pairs (1,2), (1,3), (2,3)."""
    V = RatFn.coerce(V)
    g = _grad(V)
    H = [[g[s].diff(j) for j in COORDS] for s in COORDS]
    out = []
    for j, l in PAIRS:
        r = RatFn(Poly())
        for s in COORDS:
            asl, asj = t[s, l], t[s, j]
            if asl:
                r = r + H[s][j] * asl
            if asj:
                r = r - H[s][l] * asj
            d = asl.diff(j) - asj.diff(l)
            if d:
                r = r + g[s] * d
        out.append(r)
    return out


def w_gradient(t: KillingTensor, V):
    """(sum_s a^{s1} V_s, sum_s a^{s2} V_s, sum_s a^{s3} V_s)."""
    V = RatFn.coerce(V)
    g = _grad(V)
    out = []
    for k in COORDS:
        acc = RatFn(Poly())
        for s in COORDS:
            if t[s, k]:
                acc = acc + g[s] * t[s, k]
        out.append(acc)
    return out


def _tag(k):
    # separate blocks of a stacked vector using powers of p1
    return Poly({k * ((1 << SHIFT[3]) + DEG_ONE): 1}) if k else Poly({0: 1})


def _monomials_xyz(deg):
    out = []
    for d in range(deg + 1):
        for a in range(d, -1, -1):
            for b in range(d - a, -1, -1):
                out.append(monomial_key((a, b, d - a - b)))
    return out


def integrate_gradient(G):
    """W with grad W = G (three RatFns in x, y, z), or NonIntegrableTerm.

    Ansatz W = P / Dw where Dw lowers each denominator factor of G by one
    power; P ranges over all monomials up to the degree forced by G.  The
    additive constant is fixed by giving P no component along Dw's leading
    monomial (for polynomial W: no constant term).
    """
    G = [RatFn.coerce(g) for g in G]
    if all(g.is_zero() for g in G):
        return RatFn(Poly())
    L, nums = common_denominator(G)
    Dw_f = {f: e - 1 for f, e in L.items() if e > 1}
    Dw = Poly({0: 1})
    for f, e in Dw_f.items():
        Dw = Dw * f ** e
    M_f = {f: max(L.get(f, 0), 2 * Dw_f.get(f, 0)) for f in L}

    def prod(facs):
        out = Poly({0: 1})
        for f, e in facs.items():
            if e:
                out = out * f ** e
        return out

    degL = sum(f.degree() * e for f, e in L.items())
    top = max(n.degree() - degL for n in nums if n) + 1
    N = max(top + Dw.degree(), 0)
    m_over_dw2 = prod({f: M_f[f] - 2 * Dw_f.get(f, 0) for f in M_f})
    m_over_l = prod({f: M_f[f] - L.get(f, 0) for f in M_f})
    dDw = [Dw.diff(k) for k in COORDS]
    target = Poly()
    for k in COORDS:
        if nums[k]:
            target = target + _tag(k) * nums[k] * m_over_l
    last = Dw.lead_key()
    monos = [m for m in _monomials_xyz(N) if m != last] + [last]
    ech = Echelon()
    for idx, m in enumerate(monos):
        mp = Poly({m: 1})
        col = Poly()
        for k in COORDS:
            img = mp.diff(k) * Dw - mp * dDw[k]
            if img:
                col = col + _tag(k) * img * m_over_dw2
        ech.add(col, idx)
    sol = ech.solve(target)
    if sol is None:
        raise NonIntegrableTerm("gradient has no antiderivative of the expected shape")
    P = Poly()
    for idx, c in sol.items():
        P = P + Poly.const(c) * Poly({monos[idx]: 1})
    W = RatFn._make(P, dict(Dw_f))
    if not all(W.diff(k) == G[k] for k in COORDS):
        raise NonIntegrableTerm("reconstructed W fails the gradient check")
    return W


def reconstruct_w(t: KillingTensor, V):
    """Scalar part W of the symmetry with tensor t for potential V."""
    comps = split_parameters(V)
    W = RatFn(Poly())
    for p, Vp in comps.items():
        Wp = integrate_gradient(w_gradient(t, Vp))
        if not Wp.is_zero():
            W = W + (Wp * _v(p) if p is not None else Wp)
    return W


def make_symmetry(t, V, label=""):
    return Symmetry(t, reconstruct_w(t, V), label)


# -- the Killing space and the symmetry space -------------------------------------

def _basis_monomials():
    # 1, x, y, z, x^2, xy, xz, y^2, yz, z^2
    return [monomial_key(e) for e in (
        (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0), (1, 1, 0),
        (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))]


def _unit_tensor(u):
    e, m = divmod(u, 10)
    return KillingTensor({ENTRIES[e]: Poly({_basis_monomials()[m]: 1})})


NUNKNOWNS = 60


def tensor_to_unknowns(t):
    monos = _basis_monomials()
    out = {}
    for e, ent in enumerate(ENTRIES):
        coeffs = t.a[ent].coefficients()
        for mk, c in coeffs.items():
            if mk not in monos:
                raise ValueError("tensor entry of degree > 2")
            out[e * 10 + monos.index(mk)] = c
    return out


def tensor_from_unknowns(d):
    t = {}
    monos = _basis_monomials()
    for u, c in d.items():
        e, m = divmod(u, 10)
        t.setdefault(ENTRIES[e], Poly())
        t[ENTRIES[e]] = t[ENTRIES[e]] + Poly.const(c) * Poly({monos[m]: 1})
    return KillingTensor(t)


@lru_cache(maxsize=1)
def killing_space():
    """RREF basis of the Killing tensors with entries of degree <= 2.

    Solves the Killing equations on the general tensor (6 entries x 10
    monomials = 60 unknowns); the solution space has dimension 20.
    """
    cols = [killing_form(_unit_tensor(u)) for u in range(NUNKNOWNS)]
    rels = kernel(cols)
    rows = rref_rows(rels, NUNKNOWNS)
    return tuple(tensor_from_unknowns(r) for r in rows)


def _bd_vectors(tensors, V):
    """Stacked BD-residual numerators, one vector per tensor."""
    comps = split_parameters(V)
    vecs = [Poly() for _ in tensors]
    block = 0
    for p, Vp in comps.items():
        g = _grad(Vp)
        H = [[g[s].diff(j) for j in COORDS] for s in COORDS]
        for j, l in PAIRS:
            res = []
            for t in tensors:
                r = RatFn(Poly())
                for s in COORDS:
                    asl, asj = t[s, l], t[s, j]
                    if asl:
                        r = r + H[s][j] * asl
                    if asj:
                        r = r - H[s][l] * asj
                    d = asl.diff(j) - asj.diff(l)
                    if d:
                        r = r + g[s] * d
                res.append(r)
            _, nums = common_denominator(res)
            tag = _tag(block)
            for k, n in enumerate(nums):
                if n:
                    vecs[k] = vecs[k] + tag * n
            block += 1
    return vecs


def symmetry_space(V):
    """RREF basis (as Killing tensors) of tensors whose BD residuals vanish for V."""
    ks = killing_space()
    vecs = _bd_vectors(ks, V)
    rels = kernel(vecs)
    tensors = []
    for rel in rels:
        t = KillingTensor()
        for k, c in rel.items():
            t = t + ks[k].scale(Poly.const(c))
        tensors.append(t)
    rows = rref_rows([tensor_to_unknowns(t) for t in tensors], NUNKNOWNS)
    return [tensor_from_unknowns(r) for r in rows]


def symmetry_space_dim(V, with_w=True):
    """(dimension including H, basis of Symmetry).  The quotient by H is dim - 1.

    Raises DegenerateInput when the space is larger than 6.
    """
    tensors = symmetry_space(V)
    dim = len(tensors)
    if dim > 6:
        raise DegenerateInput(f"symmetry space has dimension {dim} > 6", dim, tensors)
    syms = [Symmetry(t, reconstruct_w(t, V) if with_w else None) for t in tensors]
    return dim, syms


# -- quadratic algebra -------------------------------------------------------------

def _rank_over_params(vectors):
    """Rank over Q(a,b,c,d) of vectors whose coordinates are polynomials in the
    parameters (coordinates indexed by the non-parameter monomials)."""
    pmask = 0
    for p in PARAMS:
        pmask |= EMASK << SHIFT[p]
    rows = []
    for v in vectors:
        row = {}
        for k, c in v.coefficients().items():
            pe = k & pmask
            deg = sum((pe >> SHIFT[p]) & EMASK for p in PARAMS)
            base = (k & ~pmask) - (deg << DEG_SHIFT)
            term = Poly.const(c) * Poly({pe | (deg << DEG_SHIFT): 1})
            row[base] = row[base] + term if base in row else term
        rows.append(row)
    rank = 0
    rows = [r for r in rows if r]
    while rows:
        piv_row = rows.pop()
        col = max(piv_row)
        pv = piv_row[col]
        new = []
        for r in rows:
            c = r.get(col)
            if c is None:
                new.append(r)
                continue
            out = {}
            for b in set(r) | set(piv_row):
                val = r.get(b, Poly()) * pv - piv_row.get(b, Poly()) * c
                if val:
                    out[b] = val
            if out:
                new.append(out)
        rows = new
        rank += 1
    return rank


def bracket_structure(syms, V=None, check_representations=True):
    """Third-order brackets R_jk = {S_j, S_k} and their quadratic algebra.

    ``syms`` is a list of symmetries or a catalog record (anything with a
    ``symmetry_basis``).

    Returns a dict with the rank of span{R_jk} over the parameter field and,
    for every {R_jk, S_l}, a representation as a quadratic polynomial in the
    basis (coefficients weighted so c_ab are constants, c_a linear and c_0
    quadratic in the parameters).
    """
    if hasattr(syms, "symmetry_basis"):
        syms = syms.symmetry_basis
    S = [s.phase() if isinstance(s, Symmetry) else RatFn.coerce(s) for s in syms]
    n = len(S)
    pairs = list(combinations(range(n), 2))
    R = {jk: poisson(S[jk[0]], S[jk[1]]) for jk in pairs}
    _, rnums = common_denominator(list(R.values()))
    rdim = _rank_over_params(rnums)
    report = {"n": n, "third_order_dim": rdim, "representations": {}, "failures": []}
    if not check_representations:
        return report
    params = [Poly.var(p) for p in PARAMS]
    cols, names = [], []
    for a, b in combinations_with_replacement(range(n), 2):
        cols.append(S[a] * S[b])
        names.append(("SS", a, b))
    for a in range(n):
        for k, th in enumerate(params):
            cols.append(S[a] * th)
            names.append(("pS", k, a))
    for k1, k2 in combinations_with_replacement(range(4), 2):
        cols.append(RatFn(params[k1] * params[k2]))
        names.append(("pp", k1, k2))
    targets = {}
    for jk, r in R.items():
        for l in range(n):
            targets[(jk[0], jk[1], l)] = poisson(r, S[l])
    _, allnums = common_denominator(cols + list(targets.values()))
    colnums, tnums = allnums[: len(cols)], allnums[len(cols):]
    ech = Echelon()
    for idx, v in enumerate(colnums):
        ech.add(v, idx)
    for (key, tv) in zip(targets, tnums):
        sol = ech.solve(tv)
        if sol is None:
            report["failures"].append(key)
            continue
        report["representations"][key] = {names[i]: c for i, c in sol.items()}
    if report["failures"]:
        raise RepresentationNotFound(f"no quadratic representation for {report['failures'][:3]}")
    return report
