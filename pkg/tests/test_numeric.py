import json

import numpy as np
import pytest

import oracles
from si3.numeric import (ADMISSIBLE_BOUND, ADMISSIBLE_MARGIN, Compiled, DriftReport,
                         SingularityEncountered, SingularPoint, StepRejected, admissible_starts,
                         conservation, independence_rank, integrate, jacobian_rank,
                         order_check, regular_points, simulate)


@pytest.fixture(scope="module")
def compiled(catalog):
    return {n: Compiled(catalog.systems[n]) for n in ("I", "O", "VII", "A")}


def test_oscillator_against_closed_form(compiled):
    comp = compiled["O"]
    start = np.array([1, 0, 0, 0, 1, 0], dtype=complex)
    params = (1, 0, 0, 0)
    traj = integrate(comp, start, params, t_end=10.0, dt=1e-3)
    t = np.linspace(0, 10.0, traj.shape[0])
    x, p = oracles.oscillator(start, 1.0, t)
    assert np.max(np.abs(traj[:, :3, 0] - x)) < 1e-9
    assert np.max(np.abs(traj[:, 3:, 0] - p)) < 1e-9
    (_, drift), = conservation(comp, traj, params)
    assert drift["H"] <= 1e-10


def test_complex_oscillator_against_closed_form(compiled):
    start = np.array([1 + 0.5j, -0.3j, 0.7, 0.2, 1j, -0.4 + 0.1j])
    traj = integrate(compiled["O"], start, (0.8, 0, 0, 0), t_end=3.0, dt=1e-3)
    x, _ = oracles.oscillator(start, 0.8, np.linspace(0, 3.0, traj.shape[0]))
    assert np.max(np.abs(traj[:, :3, 0] - x)) < 1e-9


def test_pole_is_detected(compiled):
    start = np.array([0, 1, 1, 0.1, 0, 0], dtype=complex)
    with pytest.raises(SingularityEncountered):
        integrate(compiled["I"], start, (1, 0.3, 0.3, 0.3), t_end=0.1, dt=1e-3)


def test_escape_is_rejected(compiled):
    # an inverted oscillator leaves any bounded region
    start = np.array([1, 0, 0, 0, 0, 0], dtype=complex)
    with pytest.raises(StepRejected):
        integrate(compiled["O"], start, (-4, 0, 0, 0), t_end=10.0, dt=1e-2, ceiling=1e3)


def test_bad_step():
    with pytest.raises(ValueError):
        integrate(None, np.zeros(6), (0, 0, 0, 0), dt=0)


def test_masked_integration_freezes_bad_columns(compiled):
    starts = np.array([[1, 0], [1, 1], [1, 1], [0, 0.1], [0, 0], [0, 0]], dtype=complex)
    traj, alive = integrate(compiled["I"], starts, (1, 0.3, 0.3, 0.3), t_end=0.1, dt=1e-3,
                            masked=True)
    assert alive.tolist() == [True, False]
    assert np.all(traj[-1, :, 1] == starts[:, 1])


def test_equilibrium_has_zero_drift(compiled):
    traj = integrate(compiled["O"], np.zeros(6, dtype=complex), (1, 0, 0, 0), t_end=1.0)
    (_, drift), = conservation(compiled["O"], traj, (1, 0, 0, 0))
    assert all(v == 0 for v in drift.values())


@pytest.mark.parametrize("name", ["I", "A"])
def test_constants_are_conserved(catalog, compiled, name):
    reports, rejected = simulate(catalog.systems[name], seed=0, comp=compiled[name])
    assert len(reports) == 3
    for rep in reports:
        assert set(rep.drift) == {"H", "S1", "S2", "S3", "S4", "S5"}
        assert rep.max_drift() <= 1e-8


def test_admissible_starts_stay_admissible(catalog, compiled):
    draw = admissible_starts(catalog.systems["I"], seed=2, comp=compiled["I"])
    assert draw.starts.shape == (6, 3)
    assert np.max(np.abs(draw.traj)) <= ADMISSIBLE_BOUND
    assert np.min(np.abs(draw.traj[:, :3])) >= ADMISSIBLE_MARGIN


def test_simulation_is_deterministic(catalog, compiled):
    a, _ = simulate(catalog.systems["A"], seed=4, t_end=1.0, comp=compiled["A"])
    b, _ = simulate(catalog.systems["A"], seed=4, t_end=1.0, comp=compiled["A"])
    assert [r.to_json() for r in a] == [r.to_json() for r in b]


def test_report_json_fields(catalog, compiled):
    (rep, *_), _ = simulate(catalog.systems["I"], seed=1, t_end=0.5, comp=compiled["I"])
    data = json.loads(rep.to_json())
    assert {"system", "seed", "dt", "t_end", "drift", "initial", "steps", "method"} <= set(data)
    assert data["system"] == "I" and data["method"] == "rk4" and data["steps"] == 500
    assert all(v >= 0 for v in data["drift"].values())
    assert isinstance(rep, DriftReport)


def test_order_of_the_integrator(catalog, compiled):
    chk = order_check(catalog.systems["I"], seed=0, comp=compiled["I"])
    assert 8 <= chk.ratio <= 32
    assert chk.drift > chk.drift_half > 0


@pytest.mark.parametrize("name", ["I", "VII"])
def test_five_independent_constants(catalog, compiled, name):
    comp = compiled[name]
    for pt, prm in regular_points(catalog.systems[name], n=10, seed=0, comp=comp):
        assert independence_rank(None, pt, prm, comp=comp) == 5
        assert jacobian_rank(comp, pt, prm, which=range(7)) == 5


def test_rest_with_free_slice_is_degenerate(compiled):
    pt = np.array([1.1, 0.7, -0.9, 0, 0, 0], dtype=complex)
    assert independence_rank(None, pt, (0, 0, 0, 0), comp=compiled["I"]) < 5


def test_singular_point_in_rank(compiled):
    with pytest.raises(SingularPoint):
        jacobian_rank(compiled["I"], (0, 1, 1, 0.2, 0.1, 0), (1, 0.3, 0.3, 0.3))
