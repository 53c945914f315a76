import numpy as np
import pytest
from returns.result import Failure

from cqblab.core.curvature import random_kahler_operator
from cqblab.core.positivity import cqb_value, dcqb_value, form_report
from cqblab.core.rank import (
    brute_force_rank1,
    rank1_check,
    rank1_map,
    rank_k_check,
    sphere_grid,
    start_points,
)
from cqblab.models.positivity import Method, Mode, Verdict


def test_start_points_are_seeded_unit_vectors():
    points = start_points(3, 5, seed=4)
    assert points.shape == (5, 2, 3)
    assert np.allclose(np.linalg.norm(points, axis=2), 1.0)
    assert np.array_equal(points, start_points(3, 5, seed=4))
    assert not np.array_equal(points, start_points(3, 5, seed=5))


@pytest.mark.parametrize(
    ("n", "points", "rows"), [(1, 10, 1), (2, 10, 100), (3, 3, 81)]
)
def test_sphere_grid(n, points, rows):
    grid = sphere_grid(n, points)
    assert grid.shape == (rows, n)
    assert np.allclose(np.linalg.norm(grid, axis=1), 1.0)


def test_projective_plane_rank_one_extremes(p2, settings):
    cqb = rank1_check(p2.tensor, Mode.CQB, settings)
    assert cqb.min_value == pytest.approx(1 / 3, abs=1e-8)
    assert cqb.max_value == pytest.approx(2 / 3, abs=1e-8)
    assert cqb.verdict is Verdict.POSITIVE
    dcqb = rank1_check(p2.tensor, Mode.DCQB, settings)
    assert dcqb.min_value == pytest.approx(4 / 3, abs=1e-8)
    assert dcqb.max_value == pytest.approx(5 / 3, abs=1e-8)


def test_rank_one_witness(random_operator, settings):
    for mode, value in ((Mode.CQB, cqb_value), (Mode.DCQB, dcqb_value)):
        report = rank1_check(random_operator, mode, settings)
        x, y = report.witness.vectors()
        a = rank1_map(x, y, mode)
        assert np.allclose(report.witness.matrix(), a)
        assert value(random_operator, a).unwrap() == pytest.approx(
            report.min_value, abs=1e-9
        )


def test_rank_one_bounds_the_full_form(random_operator, settings):
    for mode in Mode:
        full = form_report(random_operator, mode).unwrap()
        rank1 = rank1_check(random_operator, mode, settings)
        assert rank1.min_value >= full.min_value - 1e-9
        assert rank1.max_value <= full.max_value + 1e-9


def test_mostow_siu_rank_one_is_negative(mostow, settings):
    report = rank1_check(mostow, Mode.CQB, settings)
    assert report.max_value < 0
    assert report.verdict is Verdict.NEGATIVE


def test_rank_k_is_monotone(random_operator, settings):
    rank1 = rank_k_check(random_operator, 1, Mode.CQB, settings).unwrap()
    rank2 = rank_k_check(random_operator, 2, Mode.CQB, settings).unwrap()
    full = rank_k_check(random_operator, 3, Mode.CQB, settings).unwrap()
    assert full.method is Method.EIGEN
    assert full.rank_limit == 3
    assert rank2.rank_limit == 2
    assert full.min_value - 1e-9 <= rank2.min_value <= rank1.min_value + 1e-9
    assert full.min_value == pytest.approx(
        form_report(random_operator, Mode.CQB).unwrap().min_value
    )


def test_rank_k_witness_has_rank_k(random_operator, settings):
    report = rank_k_check(random_operator, 2, Mode.DCQB, settings).unwrap()
    a = report.witness.matrix()
    assert np.linalg.matrix_rank(a, tol=1e-8) <= 2
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_rank_k_out_of_range(random_operator):
    assert isinstance(rank_k_check(random_operator, 0, Mode.CQB), Failure)
    assert isinstance(rank_k_check(random_operator, 4, Mode.CQB), Failure)


@pytest.mark.parametrize(("n", "seed"), [(2, 0), (2, 1), (3, 0)])
def test_grid_oracle_agrees(n, seed, settings):
    R = random_kahler_operator(n, seed)
    found = rank1_check(R, Mode.CQB, settings)
    oracle = brute_force_rank1(R, Mode.CQB).unwrap()
    assert oracle.method is Method.BRUTE_FORCE
    assert found.min_value == pytest.approx(oracle.min_value, abs=1e-6)


@pytest.mark.parametrize(("n", "seed"), [(2, 3), (3, 6), (3, 9)])
def test_grid_oracle_agrees_on_dual_form(n, seed):
    R = random_kahler_operator(n, seed)
    found = rank1_check(R, Mode.DCQB)
    oracle = brute_force_rank1(R, Mode.DCQB).unwrap()
    assert found.min_value == pytest.approx(oracle.min_value, abs=1e-6)
    assert found.max_value == pytest.approx(oracle.max_value, abs=1e-6)


def test_grid_oracle_is_limited_to_small_frames():
    result = brute_force_rank1(random_kahler_operator(4, 0), Mode.CQB)
    assert isinstance(result, Failure)
