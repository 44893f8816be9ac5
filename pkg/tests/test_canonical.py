import pytest

from conftest import SYSTEMS
from si3.algebra import RatFn, parse_expr
from si3.canonical import (INDEPENDENT, CanonCoeffs, NoSolution, RankDeficient, Reducer,
                           Underdetermined, check_canonical_equations, extract_from_potential,
                           extract_from_symmetries, integrability_ok, reduce_derivative)
from si3.mechanics import KillingTensor, identity_tensor

V_O = parse_expr("a*(x^2 + y^2 + z^2) + b*x + c*y + d*z")
ONE, ZERO = RatFn.coerce(1), RatFn.coerce(0)


@pytest.fixture(scope="module")
def coeffs(catalog):
    return {n: extract_from_potential(catalog.systems[n].potential) for n in SYSTEMS}


def test_oscillator_has_zero_coefficients():
    assert extract_from_potential(V_O).is_zero()


def test_single_parameter_is_underdetermined():
    with pytest.raises(Underdetermined):
        extract_from_potential(parse_expr("a*x"))


def test_potential_outside_the_class():
    # four independent parameters, but the last one does not obey the same equations
    with pytest.raises(NoSolution):
        extract_from_potential(parse_expr("a*(x^2 + y^2 + z^2) + b*x + c*y + d*x^3"))


def test_linear_relations_are_built_in():
    cc = CanonCoeffs({k: parse_expr(f"x + {n}") for n, k in enumerate(INDEPENDENT)})
    assert cc["C12"] == cc["A23"] == cc["B13"]
    assert cc["C13"] == cc["B12"] - cc["A22"] + cc["A33"]
    assert cc["C22"] == cc["B23"] - cc["A13"]
    assert cc["C23"] == cc["A12"] + cc["B33"]


@pytest.mark.parametrize("name", SYSTEMS)
def test_catalog_systems_are_nondegenerate(catalog, coeffs, name):
    cc = coeffs[name]
    assert check_canonical_equations(cc, catalog.systems[name].potential)
    assert integrability_ok(cc)


@pytest.mark.parametrize("name", SYSTEMS)
def test_cross_method_agreement(catalog, coeffs, name):
    tensors = [s.tensor for s in catalog.systems[name].symmetry_basis[:5]]
    assert extract_from_symmetries(tensors) == coeffs[name]


def test_four_symmetries_fix_the_third_system(catalog, coeffs):
    rec = catalog.systems["III"]
    assert rec.label == "[23]"
    four = [s.tensor for s in rec.symmetry_basis[:4]]
    assert extract_from_symmetries(four) == coeffs["III"]
    assert extract_from_symmetries(four + [identity_tensor()]) == coeffs["III"]


def test_repeated_symmetry_is_rank_deficient(catalog):
    t = catalog.systems["I"].symmetry_basis[1].tensor
    with pytest.raises(RankDeficient):
        extract_from_symmetries([t] * 5)


def test_free_tensor_alone_is_rank_deficient():
    with pytest.raises(RankDeficient):
        extract_from_symmetries([KillingTensor.from_quadratic(parse_expr("p1^2"))])


def test_integrability_trivial_and_failing():
    assert integrability_ok(CanonCoeffs())
    assert not integrability_ok(CanonCoeffs({"A12": 1}))


def test_reduce_second_derivatives(coeffs):
    cc = coeffs["I"]
    assert reduce_derivative(cc, (1, 1, 0)) == (cc["A12"], cc["B12"], cc["C12"], ZERO)
    assert reduce_derivative(cc, (0, 2, 0)) == (cc["A22"], cc["B22"], cc["C22"], ONE)
    assert reduce_derivative(cc, (2, 0, 0)) == (ZERO, ZERO, ZERO, ONE)


def test_oscillator_third_derivatives_vanish():
    cc = CanonCoeffs()
    for m in ((1, 2, 0), (0, 0, 3), (1, 1, 1), (3, 0, 0)):
        assert all(c.is_zero() for c in reduce_derivative(cc, m))


def test_order_one_is_rejected():
    with pytest.raises(ValueError):
        reduce_derivative(CanonCoeffs(), (1, 0, 0))


@pytest.mark.parametrize("name", SYSTEMS)
def test_mixed_partials_agree(coeffs, name):
    r = Reducer(coeffs[name])
    routes = [r.via((1, 1, 1), v) for v in range(3)]
    assert routes[0] == routes[1] == routes[2]


@pytest.mark.parametrize("name", ["I", "II", "VII"])
def test_reduction_matches_actual_derivatives(catalog, coeffs, name):
    V = catalog.systems[name].potential
    frame = (V.diff(0), V.diff(1), V.diff(2), V.diff(0).diff(0))
    for m in ((1, 1, 0), (0, 1, 2), (2, 1, 0), (0, 0, 3), (1, 1, 1)):
        form = reduce_derivative(coeffs[name], m)
        actual = V
        for k, n in enumerate(m):
            for _ in range(n):
                actual = actual.diff(k)
        assert sum((c * w for c, w in zip(form, frame)), ZERO) == actual
