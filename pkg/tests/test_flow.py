import csv

import numpy as np
import pytest
from returns.result import Failure, Success

from cqblab.core.curvature import (
    constant_holomorphic_curvature,
    random_kahler_operator,
    ricci,
    scaled,
    symmetry_residual,
    tensor_norm,
)
from cqblab.core.flow import (
    TRAJECTORY_COLUMNS,
    convexity_check,
    default_constants,
    integrate,
    membership,
    membership_at,
    membership_experiment,
    perturbed_fubini_study,
    reaction_derivative,
    ricci_derivative,
    write_trajectory_csv,
)
from cqblab.models.curvature import CurvatureTensor
from cqblab.models.flow import FlowConstants, FlowState


def unit_random(seed: int) -> CurvatureTensor:
    R = random_kahler_operator(3, seed)
    return scaled(R, 1 / tensor_norm(R))


def k_at(t_max: float, dt: float) -> float:
    R0 = constant_holomorphic_curvature(1, 1.0)
    run = integrate(R0, default_constants(R0), t_max, dt, monitor_every=0).unwrap()
    return run.final.tensor.component(0, 0, 0, 0).real


def test_one_dimensional_derivative_is_k_squared():
    R = constant_holomorphic_curvature(1, 3.0)
    assert reaction_derivative(R).component(0, 0, 0, 0) == pytest.approx(9.0)


def test_zero_tensor_is_stationary():
    zero = scaled(constant_holomorphic_curvature(2, 1.0), 0.0)
    assert np.all(reaction_derivative(zero).to_array() == 0)


@pytest.mark.parametrize("seed", range(3))
def test_derivative_keeps_symmetries_and_traces_to_ricci(seed):
    R = unit_random(seed)
    derivative = reaction_derivative(R)
    assert symmetry_residual(derivative) <= 1e-12
    traced = np.einsum("abcc->ab", derivative.to_array())
    assert np.max(np.abs(traced - ricci_derivative(R).entries)) <= 1e-12


def test_default_constants():
    R0 = constant_holomorphic_curvature(3, 1.0)
    constants = default_constants(R0)
    norm = tensor_norm(R0)
    assert constants.D1 == 4.0
    assert constants.D2 == pytest.approx(2 * norm)
    assert constants.E1 == pytest.approx(100 * 3 * 16 * 2 * norm)
    assert constants.epsilon == pytest.approx(1 / constants.E1)
    flat = default_constants(constant_holomorphic_curvature(1, 1.0))
    assert flat.E1 == 0.0
    assert flat.epsilon == 1.0


def test_closed_form_solution():
    assert k_at(0.5, 1e-4) == pytest.approx(2.0, abs=1e-6)


def test_fourth_order_convergence():
    coarse = abs(k_at(0.5, 0.05) - 2.0)
    fine = abs(k_at(0.5, 0.025) - 2.0)
    assert 8 <= coarse / fine <= 32


def test_trace_identity_along_the_run():
    for seed in range(5):
        constants = FlowConstants(D1=4, E1=0, D2=2, E2=1, epsilon=1)
        run = integrate(unit_random(seed), constants, 0.01, 1e-3, monitor_every=0)
        states = run.unwrap().states
        assert len(states) == 11
        assert max(s.trace_residual for s in states) <= 1e-12


def test_flag_ricci_stays_positive(flag_a2):
    constants = FlowConstants(D1=4, E1=10, D2=100, E2=1, epsilon=0.01)
    run = integrate(flag_a2.tensor, constants, 0.01, 1e-3, monitor_every=0).unwrap()
    assert not run.truncated
    for state in run.states:
        ric = ricci(state.tensor).entries
        expected = 2 / (1 - 2 * state.t)
        assert np.allclose(ric, expected * np.eye(3), atol=1e-8)
        assert np.linalg.eigvalsh(ric)[0] >= 0


def test_zero_start_is_constant():
    zero = scaled(constant_holomorphic_curvature(2, 1.0), 0.0)
    constants = default_constants(zero)
    assert constants.D2 == 1.0
    run = integrate(zero, constants, constants.epsilon, constants.epsilon / 5)
    trajectory = run.unwrap()
    assert len(trajectory.states) == 6
    for state in trajectory.states:
        assert tensor_norm(state.tensor) == 0.0
        assert state.membership is not None
        assert state.membership.inside


def test_blow_up_guard_truncates():
    R0 = constant_holomorphic_curvature(1, 1.0)
    run = integrate(R0, default_constants(R0), 1.0, 1e-3, monitor_every=0).unwrap()
    assert run.truncated
    assert run.final.t < 1.0
    assert run.final.membership is not None


def test_preconditions():
    R0 = constant_holomorphic_curvature(2, 1.0)
    constants = default_constants(R0)
    assert isinstance(integrate(R0, constants, 0.5), Failure)
    assert isinstance(integrate(R0, constants, constants.epsilon, dt=-1.0), Failure)
    loose = FlowConstants(D1=1, E1=10, D2=1, E2=1, epsilon=1)
    assert isinstance(integrate(R0, loose, 0.05), Failure)


def test_membership_of_fubini_study(settings):
    R = constant_holomorphic_curvature(2, 1.0)
    found = membership_at(0.0, R, default_constants(R), settings)
    assert found.inside
    assert found.margin31 == pytest.approx(1.5)
    assert found.margin32 > 0


def test_membership_of_negative_model(mostow, settings):
    state = FlowState(t=0.0, tensor=mostow, constants=default_constants(mostow))
    found = membership(state, settings)
    assert not found.c31
    assert found.margin31 == pytest.approx(-5.0)


def test_convexity(settings):
    R = perturbed_fubini_study(2, seed=1)
    S = perturbed_fubini_study(2, seed=2)
    constants = default_constants(R)
    assert convexity_check(R, R, [0.5], constants, settings=settings) == Success(True)
    mixed = convexity_check(R, S, [0.25, 0.5, 0.75], constants, settings=settings)
    assert mixed == Success(True)


def test_convexity_requires_members(mostow, settings):
    R = perturbed_fubini_study(2, seed=1)
    result = convexity_check(R, mostow, [0.5], default_constants(R), settings=settings)
    assert isinstance(result, Failure)
    assert "not inside" in result.failure()


def test_membership_experiment_reports_every_run(settings):
    report = membership_experiment(
        count=2, n=2, seed=3, steps=4, monitor_every=2, settings=settings
    ).unwrap()
    assert [row.seed for row in report.rows] == [3, 4]
    for row in report.rows:
        assert row.initially_inside
        assert row.t_end > 0


def test_trajectory_csv(tmp_path):
    R0 = constant_holomorphic_curvature(1, 1.0)
    run = integrate(R0, default_constants(R0), 0.01, 1e-3, monitor_every=5).unwrap()
    path = write_trajectory_csv(run, tmp_path / "run.csv").unwrap()
    with path.open() as handle:
        rows = list(csv.DictReader(handle))
    assert list(rows[0]) == list(TRAJECTORY_COLUMNS)
    assert len(rows) == len(run.states)
    assert rows[0]["c31"] == "true"
    assert rows[1]["c31"] == ""
    assert float(rows[-1]["t"]) == pytest.approx(0.01)
