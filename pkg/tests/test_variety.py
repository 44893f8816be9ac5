import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SYSTEMS
from si3.algebra import ExtScalar, Poly, RatFn
from si3.canonical import INDEPENDENT, CanonCoeffs
from si3.variety import (DIRECTIONS, IDEAL, XYTuple, closure_suite, eval_identities, from_xy,
                         identities_hold, ideal_member, induced_derivative, invariant_sets,
                         ladder_poly, quad_basis, real_form, relative_invariants,
                         span_equivalence, table_form, to_d, to_xy, translation_derivative,
                         verify_diffconds, x_module_check, zw_forms)

I = ExtScalar.gen("i")
rationals = st.fractions(min_value=-9, max_value=9, max_denominator=7)
scalars = st.tuples(rationals, rationals).map(lambda p: ExtScalar(p[0]) + I * p[1])
tuples10 = st.lists(scalars, min_size=10, max_size=10)


def unit(name):
    return [ExtScalar(1) if k == name else ExtScalar() for k in INDEPENDENT]


# -- change of variables -------------------------------------------------------------

def test_zero_maps_to_zero():
    assert to_xy(CanonCoeffs()).is_zero()


@given(tuples10)
def test_round_trip(vals):
    xy = to_xy(vals)
    assert from_xy(xy) == vals
    assert to_xy(from_xy(XYTuple.from_values(vals))).values() == vals


def test_round_trip_on_functions(catalog, xy_tuples):
    from si3.canonical import extract_from_potential

    cc = extract_from_potential(catalog.systems["II"].potential)
    assert from_xy(xy_tuples["II"]) == cc


def test_last_system_is_constant(xy_tuples):
    X, Y = real_form(xy_tuples["A"])
    assert all(v.is_zero() for v in X)
    assert [str(v) for v in Y] == ["-2", "2*i", "0", "0", "0", "0", "0"]


@pytest.mark.parametrize("name", SYSTEMS)
def test_sum_of_squares_matches_table(catalog, xy_tuples, name):
    X, _ = real_form(xy_tuples[name])
    assert X[0] * X[0] + X[1] * X[1] + X[2] * X[2] == catalog.systems[name].sum_x2


@pytest.mark.parametrize("name", SYSTEMS)
def test_table_rows_up_to_axis_convention(catalog, xy_tuples, name):
    rec = catalog.systems[name]
    X, Y = table_form(xy_tuples[name])
    assert list(X) == rec.table_x
    assert list(Y) == rec.table_y


# -- identities --------------------------------------------------------------------------

def test_origin_lies_on_variety():
    res = eval_identities([ExtScalar()] * 10)
    assert not any(res["I"]) and not any(res["ZW"])


def test_single_coordinate_off_variety():
    res = eval_identities(unit("A23"))
    assert res["I"][5] == -3
    assert all(not r for r in res["I"][:5])
    assert not identities_hold(unit("A23"))


@pytest.mark.parametrize("name", SYSTEMS)
def test_catalog_points_lie_on_variety(xy_tuples, name):
    res = eval_identities(xy_tuples[name])
    assert all(r.is_zero() for r in res["I"] + res["ZW"])


@settings(max_examples=200)
@given(tuples10)
def test_both_forms_cut_out_the_same_set(vals):
    # the two forms span the same space, so they vanish together
    res = eval_identities(vals)
    assert (not any(res["I"])) == (not any(res["ZW"]))


def test_span_equivalence():
    assert span_equivalence()
    zw = [to_d(z) for z in zw_forms()]
    assert not span_equivalence(IDEAL[:5], zw)
    assert span_equivalence(IDEAL, IDEAL)


# -- ideal membership and closure ----------------------------------------------------------

def test_generator_is_a_member():
    cert = ideal_member(IDEAL[0], IDEAL, 0)
    assert cert is not None
    assert cert[0] == Poly.const(1) and all(not cert[k] for k in range(1, 6))


def test_derivative_of_generator_is_a_member():
    q = induced_derivative(IDEAL[1], "-")
    cert = ideal_member(q, IDEAL, 1)
    assert cert is not None
    total = Poly()
    for k, m in cert.items():
        total = total + m * IDEAL[k]
    assert total == q


def test_square_is_not_a_member():
    a12 = Poly.var(INDEPENDENT.index("A12"))
    assert ideal_member(a12 * a12, IDEAL, 1) is None


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        ideal_member(IDEAL[0], IDEAL, -1)


@pytest.fixture(scope="module")
def closure():
    return closure_suite()


def test_ideal_is_closed_under_translations(closure):
    assert len(closure["full"]) == 18
    assert all(closure["full"].values())


def test_five_generators_are_not_closed(closure):
    assert not all(closure["partial"].values())
    assert closure["sixth_independent"]


def test_x_block_is_a_relative_invariant():
    out = x_module_check()
    assert len(out) == 9 and all(out.values())


# -- translation derivatives ---------------------------------------------------------------

def test_derivative_at_origin():
    for d in DIRECTIONS:
        assert translation_derivative([ExtScalar()] * 10, d).is_zero()


def test_derivative_of_constant_tuple_vanishes(xy_tuples):
    for d in DIRECTIONS:
        assert all(v.is_zero() for v in translation_derivative(xy_tuples["A"], d).values())


def test_bad_direction():
    with pytest.raises(ValueError):
        translation_derivative([ExtScalar()] * 10, "x")


@pytest.mark.parametrize("name", SYSTEMS)
def test_differential_relations(catalog, xy_tuples, name):
    rep = verify_diffconds(catalog.systems[name], xy_tuples[name])
    assert rep["checked"] == 30
    assert rep["failures"] == []


def test_sixth_system_against_direct_differentiation(xy_tuples):
    xy = xy_tuples["VI"]
    d = translation_derivative(xy, "z")
    assert d.values() == [v.diff(2) for v in xy.values()]
    iy = RatFn(Poly.const(I))
    d = translation_derivative(xy, "+")
    assert d.values() == [v.diff(1) * iy + v.diff(0) for v in xy.values()]


# -- ladder structure ---------------------------------------------------------------------

@pytest.mark.parametrize("family,l", [("9a", 4), ("9b", 4), ("5a", 2), ("5b", 2), ("5c", 2)])
def test_ladder_consistency(family, l):
    fam = quad_basis()[family]
    assert not ladder_poly(fam[l], "J+")
    assert not ladder_poly(fam[-l], "J-")
    for m in range(-l, l + 1):
        assert ladder_poly(fam[m], "J3") == fam[m] * m
    for m in range(l, -l, -1):
        c = ExtScalar.sqrt((l + m) * (l - m + 1))
        assert ladder_poly(fam[m], "J-") == fam[m - 1] * c


def test_scalars_are_rotation_invariant():
    qb = quad_basis()
    for op in ("J+", "J-", "J3"):
        assert not ladder_poly(qb["1a"][0], op)
        assert not ladder_poly(qb["W"][0], op)


# -- relative invariants ---------------------------------------------------------------------

def test_invariant_set_sizes():
    sizes = [len(v) for v in invariant_sets().values()]
    assert sizes == [3, 7, 6, 6, 5, 14]


@pytest.mark.parametrize("name", SYSTEMS)
def test_invariants_match_table(catalog, xy_tuples, name):
    rec = catalog.systems[name]
    assert relative_invariants(rec, xy_tuples[name]) == rec.expected_invariants


def test_invariant_examples(catalog, xy_tuples):
    inv = {n: relative_invariants(catalog.systems[n], xy_tuples[n]) for n in ("III", "O", "VII")}
    assert inv["III"][2] and not inv["III"][0]
    assert all(inv["O"])
    assert inv["VII"] == (True, False, True, True, True, False)
