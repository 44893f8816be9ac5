import random
from fractions import Fraction

import pytest
import sympy as sp

import oracles
from conftest import SYSTEMS
from si3.algebra import ExtScalar, parse_expr
from si3.algebra.linalg import as_vector, rank
from si3.liegroup import (SingularPoint, WeightOutOfRange, action_matrix, action_rank,
                          block_matrix, commutator, contains, element, isotropy, ladder,
                          parse_point)
from si3.variety import XY_KEYS

I = ExtScalar.gen("i")
V_I = parse_expr("a*(x^2 + y^2 + z^2) + b/x^2 + c/y^2 + d/z^2")
ISOTROPY = {"I": 0, "II": 1, "III": 2, "IV": 1, "V": 2, "VI": 2, "VII": 3, "O": 6, "OO": 3, "A": 4}


def regular_points(rec, n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3))
        try:
            action_matrix(rec, p)
        except SingularPoint:
            continue
        out.append(p)
    return out


def test_ladder_examples():
    assert ladder(3, "J3", 2) == (ExtScalar(2), 2)
    assert not ladder(1, "J+", 1)[0]
    assert ladder(1, "J+", 0) == (ExtScalar.sqrt(2), 1)
    with pytest.raises(WeightOutOfRange):
        ladder(1, "J-", 2)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_blocks_match_standard_spin_matrices(l):
    ours = [block_matrix(l, op) for op in ("J+", "J-", "J3")]
    for M, ref in zip(ours, oracles.spin_matrices(l)):
        got = sp.Matrix([[oracles.field_value(c) for c in row] for row in M])
        assert sp.simplify(got - ref) == sp.zeros(2 * l + 1)


@pytest.mark.parametrize("l", [1, 3])
def test_commutation_relations(l):
    jp, jm, j3 = (block_matrix(l, op) for op in ("J+", "J-", "J3"))
    assert commutator(j3, jp) == jp
    assert commutator(j3, jm) == [[-c for c in row] for row in jm]
    assert commutator(jp, jm) == [[2 * c for c in row] for row in j3]


def test_parse_point():
    assert parse_point("1,2,3") == (ExtScalar(1), ExtScalar(2), ExtScalar(3))
    assert parse_point("1/2+3i, -2i, i") == (ExtScalar(Fraction(1, 2)) + 3 * I, -2 * I, I)
    for bad in ("1,2", "x,1,2", "1,2,sqrt"):
        with pytest.raises(ValueError):
            parse_point(bad)


def test_oscillator_is_a_fixed_point(catalog):
    M = action_matrix(catalog.systems["O"], (1, 2, 3))
    assert all(not c for row in M for c in row)


def test_constant_tuple_has_no_translation_part(catalog):
    M = action_matrix(catalog.systems["A"], (1, -2, 5))
    assert all(not row[c] for row in M for c in range(3))
    assert any(row[c] for row in M for c in range(3, 6))


def test_first_system_is_locally_transitive(catalog):
    assert action_rank(catalog.systems["I"], (1, 2, 3)) == 6
    assert action_rank(V_I, (1, 2, 3)) == 6


def test_singular_point(catalog):
    with pytest.raises(SingularPoint):
        action_matrix(catalog.systems["I"], (0, 1, 2))


@pytest.mark.parametrize("name", ["I", "II", "VI", "VII"])
def test_translation_columns_are_coordinate_derivatives(catalog, xy_tuples, name):
    # the columns come from the differential relations; compare with plain calculus
    pt = regular_points(catalog.systems[name], 1, seed=3)[0]
    M = action_matrix(catalog.systems[name], pt)
    at = {k: ExtScalar._coerce(v) for k, v in enumerate(pt)}
    for r, f in enumerate(xy_tuples[name].values()):
        for c in range(3):
            assert M[r][c] == ExtScalar._coerce(f.diff(c).evaluate(at)), (XY_KEYS[r], c)


def test_isotropy_of_oscillator(catalog):
    dim, basis = isotropy(catalog.systems["O"], (1, 2, 3))
    assert dim == 6


def test_isotropy_of_last_system(catalog):
    dim, basis = isotropy(catalog.systems["A"], (1, 2, 3))
    assert dim == 4
    for name in ("P1", "P2", "P3"):
        assert contains(basis, element(**{name: 1}))
    assert contains(basis, element(J1=1, J2=I))
    assert not contains(basis, element(J1=1))
    assert "J1 + i*J2" in [str(b.normalized()) for b in basis]


def test_isotropy_of_first_system_is_trivial(catalog):
    assert isotropy(catalog.systems["I"], (Fraction(1, 3), 2, -5))[0] == 0


@pytest.mark.parametrize("name", SYSTEMS)
def test_isotropy_dimension_is_constant(catalog, name):
    rec = catalog.systems[name]
    dims = {isotropy(rec, p)[0] for p in regular_points(rec, 5, seed=11)}
    assert dims == {ISOTROPY[name]}


@pytest.mark.parametrize("name", ["OO", "VI"])
def test_orbit_dimension_bounds_coordinate_dependence(catalog, name):
    # the translation rank can not exceed the orbit dimension, and the
    # coordinate dependence of each block can not exceed the translation rank
    rec = catalog.systems[name]
    pt = regular_points(rec, 1, seed=5)[0]
    M = action_matrix(rec, pt)
    trans = rank([as_vector([M[r][c] for r in range(10)]) for c in range(3)])
    orbit = 6 - isotropy(rec, pt)[0]
    assert max(rec.d_x, rec.d_y) <= trans <= orbit


@pytest.mark.parametrize("name", SYSTEMS)
def test_isotropy_basis_is_independent_of_the_point(catalog, name):
    rec = catalog.systems[name]
    bases = {tuple(str(b.normalized()) for b in isotropy(rec, p)[1])
             for p in regular_points(rec, 4, seed=7)}
    assert len(bases) == 1


def _family_preserved(V, field):
    """Whether a coordinate vector field maps each parameter component of V
    into the span of the components and the constants (sympy, generic points)."""
    comps = [sp.diff(V, s) for s in (oracles.A, oracles.B, oracles.C, oracles.D)]
    images = [sum(f * sp.diff(v, q) for f, q in zip(field, oracles.COORDS)) for v in comps]
    rng = random.Random(0)
    pts = [{q: sp.Rational(rng.randint(1, 40), rng.randint(1, 9)) for q in oracles.COORDS}
           for _ in range(12)]
    base = sp.Matrix([[sp.sympify(f).subs(p) for p in pts] for f in comps + [sp.Integer(1)]])
    full = sp.Matrix([[sp.sympify(f).subs(p) for p in pts] for f in comps + [1] + images])
    return full.rank() == base.rank()


@pytest.mark.parametrize("name,gens", [("V", ["P3", "J3"]), ("III", ["J3", "J1 - i*J2"])])
def test_isotropy_reflects_symmetries_of_the_family(catalog, name, gens):
    rec = catalog.systems[name]
    basis = isotropy(rec, regular_points(rec, 1, seed=1)[0])[1]
    assert sorted(str(b.normalized()) for b in basis) == sorted(gens)
    # the same invariances, read off the potential directly
    x, y, z = oracles.COORDS
    V = oracles.sym(rec.potential)
    assert _family_preserved(V, (0, 0, 1)) == (name == "V")
    assert _family_preserved(V, (-y, x, 0))
    assert not _family_preserved(V, (0, -z, y))
