import dataclasses

import pytest

from conftest import SYSTEMS
from si3.algebra import parse_expr
from si3.canonical import NoSolution, extract_from_potential
from si3.catalog import (DATA_FILE, CatalogError, UnknownSystem, check_pde, empty_families,
                         get_system, load_catalog, separability_matrix, variant_equivalent)
from si3.variety import table_form, to_xy


@pytest.fixture(scope="module")
def matrix(catalog):
    return separability_matrix(catalog)


def test_systems_in_order(catalog):
    assert tuple(catalog.systems) == SYSTEMS
    assert catalog.version == 3
    assert len(catalog.families) == 14


def test_get_system(catalog):
    assert get_system("I", catalog).potential == parse_expr(
        "a*(x^2 + y^2 + z^2) + b/x^2 + c/y^2 + d/z^2")
    assert get_system("A", catalog).potential == parse_expr(
        "a*((x - i*y)^3 + 6*(x^2 + y^2 + z^2)) + b*((x - i*y)^2 + 2*(x + i*y))"
        " + c*(x - i*y) + d*z")
    with pytest.raises(UnknownSystem):
        get_system("Q", catalog)


@pytest.mark.parametrize("name", SYSTEMS)
def test_six_symmetries_each(catalog, name):
    rec = catalog.systems[name]
    assert len(rec.symmetry_basis) == 6
    assert len(rec.expected_invariants) == 6


def test_check_pde_examples(catalog):
    fam = catalog.families
    assert check_pde(catalog.systems["I"].potential, fam["spherical"])
    assert check_pde(catalog.systems["IV"].potential, fam["parabolic-cylindrical"])


def test_generic_system_separates_nowhere(matrix):
    assert not any(matrix["VII"].values())


def test_conclusions(matrix):
    assert matrix["A"]["semihyperbolic"] and matrix["VI"]["semihyperbolic"]
    assert matrix["II"]["hyperbolic-cylindrical"]
    assert matrix["III"]["degenerate-elliptic-2"]


def test_every_family_is_realized(matrix):
    assert empty_families(matrix) == []


@pytest.mark.parametrize("name", SYSTEMS)
def test_memberships_match_records(catalog, matrix, name):
    rec = catalog.systems[name]
    found = {f for f, ok in matrix[name].items() if ok}
    assert found == set(rec.separability) | set(rec.also_separates)


def test_stored_orientation_alone(catalog):
    # the semihyperbolic memberships need the reoriented variants
    plain = separability_matrix(catalog, include_variants=False)
    assert not plain["A"]["semihyperbolic"]
    assert not plain["VI"]["semihyperbolic"]


@pytest.mark.parametrize("variant", ["IVp", "Vx", "VIs", "As"])
def test_variants_are_equivalent(catalog, variant):
    assert variant_equivalent(catalog.variants[variant], catalog)


def test_unrelated_variant_is_rejected(catalog):
    fake = dataclasses.replace(catalog.variants["IVp"], system="I")
    assert not variant_equivalent(fake, catalog)


def test_errata_present(catalog):
    printed = [e.printed for e in catalog.errata]
    assert any("b*(x + i*y)^2" in p for p in printed)
    assert len(catalog.errata) >= 5
    assert all(e.where and e.resolution for e in catalog.errata)


def test_misprinted_third_potential_is_degenerate(catalog):
    # the alternative printing of the beta term does not give a member of the class
    bad = parse_expr(catalog.errata[0].printed.replace("R2", "(x^2 + y^2 + z^2)"))
    with pytest.raises(NoSolution):
        extract_from_potential(bad)


@pytest.mark.parametrize("name", SYSTEMS + ("IVp", "VIs", "As"))
def test_z_split_potentials(catalog, name):
    V = catalog.systems[name].potential if name in catalog.systems else catalog.variants[name].potential
    if not (V.diff(0).diff(2).is_zero() and V.diff(1).diff(2).is_zero()):
        pytest.skip("potential does not split off z")
    X, Y = table_form(to_xy(extract_from_potential(V)))
    assert Y[6] == -2 * X[2]
    assert Y[2].is_zero() and Y[3].is_zero()
    assert X[0] == Y[4] and X[1] == Y[5]


def test_override_by_environment(tmp_path, monkeypatch):
    text = DATA_FILE.read_text()
    custom = tmp_path / "catalog.txt"
    custom.write_text(text.replace("label = [2111]", "label = [custom]"))
    monkeypatch.setenv("SI3_CATALOG", str(custom))
    cat = load_catalog()
    assert cat.systems["I"].label == "[custom]"
    assert cat.path == str(custom.resolve())


def test_unsupported_version(tmp_path):
    bad = tmp_path / "old.txt"
    bad.write_text(DATA_FILE.read_text().replace("version = 3", "version = 1", 1))
    with pytest.raises(CatalogError, match="version"):
        load_catalog(bad)


def test_missing_file(tmp_path):
    with pytest.raises(CatalogError):
        load_catalog(tmp_path / "absent.txt")
