"""Sparse exact elimination with vectors stored as polynomials.

A vector is any ``Poly``: its coordinates are the field coefficients of the
monomials.  Rows are kept in echelon form keyed by leading monomial, and each
row remembers which input vectors it was built from, so the same structure
answers rank, kernel and membership-with-certificate questions.
"""
from __future__ import annotations

from .field import ExtScalar, ext_inv
from .poly import RAD_MASK, Poly, monomial_key

_ONE = ExtScalar(1)


def _scale(vec: Poly, c: ExtScalar) -> Poly:
    if c.is_rational():
        return vec * c.rational()
    return vec * Poly.const(c)


def _combo_axpy(dst, src, c):
    """dst -= c * src for label->ExtScalar dicts (in place)."""
    for lab, v in src.items():
        nv = dst.get(lab, ExtScalar()) - c * v
        if nv:
            dst[lab] = nv
        else:
            dst.pop(lab, None)


class Echelon:
    """Incremental echelon basis of a span of vectors."""

    def __init__(self, track=True):
        self.rows = {}  # lead monomial -> (row, combo)
        self.track = track
        self.labels = []

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec, combo=None, full=False):
        """Reduce ``vec``; returns (remainder, combo).

        With ``full=False`` only leading terms are reduced, which suffices for
        membership tests; ``full=True`` reduces every monomial.
        """
        combo = dict(combo) if combo else {}
        rows = self.rows
        if not full:
            while vec.terms:
                lk = max(vec.terms) & ~RAD_MASK
                hit = rows.get(lk)
                if hit is None:
                    break
                c = vec.coeff(lk)
                row, rc = hit
                vec = vec - _scale(row, c)
                if self.track:
                    _combo_axpy(combo, rc, c)
            return vec, combo
        out = Poly()
        while vec.terms:
            lk = max(vec.terms) & ~RAD_MASK
            c = vec.coeff(lk)
            hit = rows.get(lk)
            if hit is None:
                lead = Poly.const(c) * Poly({lk: 1})
                out = out + lead
                vec = vec - lead
                continue
            row, rc = hit
            vec = vec - _scale(row, c)
            if self.track:
                _combo_axpy(combo, rc, c)
        return out, combo

    def add(self, vec, label=None):
        """Insert a vector.  Returns None if independent, else the relation.

        The relation is a dict label -> coefficient with sum coef*vec_label = 0.
        """
        if label is None:
            label = len(self.labels)
        self.labels.append(label)
        combo = {label: _ONE} if self.track else {}
        rem, combo = self.reduce(Poly.coerce(vec), combo)
        if not rem.terms:
            return combo
        lk = max(rem.terms) & ~RAD_MASK
        lc = rem.coeff(lk)
        if lc != 1:
            inv = ext_inv(lc)
            rem = _scale(rem, inv)
            combo = {k: v * inv for k, v in combo.items()}
        self.rows[lk] = (rem, combo)
        return None

    def solve(self, target):
        """Coefficients {label: c} with target = sum c*vec_label, or None."""
        rem, combo = self.reduce(Poly.coerce(target), {})
        if rem.terms:
            return None
        # reduce() subtracts c*row; combo holds -(coefficients)
        return {k: -v for k, v in combo.items()}


def rank(vectors):
    e = Echelon(track=False)
    for v in vectors:
        e.add(v)
    return e.rank


def kernel(vectors):
    """Basis of {c : sum c_k vectors[k] = 0} as list of dicts index -> ExtScalar."""
    e = Echelon()
    out = []
    for k, v in enumerate(vectors):
        rel = e.add(v, k)
        if rel is not None:
            out.append(rel)
    return out


def as_vector(entries):
    """Encode a sequence of field elements as a Poly (entry r -> x^r)."""
    terms = Poly()
    for r, v in enumerate(entries):
        if v:
            terms = terms + Poly.const(ExtScalar._coerce(v)) * Poly({monomial_key([r]): 1})
    return terms


def from_vector(vec, n):
    return [vec.coeff(monomial_key([r])) for r in range(n)]


def rref_rows(vectors, n):
    """Reduced row echelon form of dicts index -> ExtScalar over n unknowns.

    Unknown 0 is the most significant position.
    """
    # encode unknown j as x^(n-1-j) so lower indices lead
    def enc(d):
        return as_vector([d.get(n - 1 - r, ExtScalar()) for r in range(n)])

    e = Echelon(track=False)
    for d in vectors:
        e.add(enc(d))
    rows = []
    for lk in sorted(e.rows, reverse=True):
        row, _ = e.rows[lk]
        others = Echelon(track=False)
        others.rows = {k: v for k, v in e.rows.items() if k != lk}
        red, _ = others.reduce(row, full=True)
        vals = from_vector(red, n)
        rows.append({n - 1 - r: v for r, v in enumerate(vals) if v})
    return rows
