from fractions import Fraction

import pytest
from returns.maybe import Nothing, Some
from returns.result import Failure

from cqblab.core.cspace import (
    build_cspace,
    describe,
    implied_coefficients,
    invariant_metric,
    kahler_einstein_coefficients,
    proportionality_factor,
)
from cqblab.core.lie import build_algebra


def space(family, rank, phi):
    return build_cspace(build_algebra(family, rank).unwrap(), phi).unwrap()


def test_full_flag_frame():
    flag = space("A", 2, [1, 2])
    assert flag.n == 3
    assert flag.b2 == 2
    assert set(flag.frame_labels()) == {"alpha_12", "alpha_23", "alpha_13"}


@pytest.mark.parametrize(
    ("rank", "phi", "n"), [(2, [1], 2), (3, [1], 3), (3, [2], 4), (5, [2, 4], 12)]
)
def test_frame_dimension(rank, phi, n):
    assert space("A", rank, phi).n == n


@pytest.mark.parametrize("phi", [[], [0], [3]])
def test_bad_phi(phi):
    alg = build_algebra("A", 2).unwrap()
    assert isinstance(build_cspace(alg, phi), Failure)


def test_invariant_metric_is_additive():
    flag = space("A", 2, [1, 2])
    metric = invariant_metric(flag, [1, 1]).unwrap()
    g = {root.label(): value for root, value in metric.g.items()}
    assert g == {"alpha_12": 1, "alpha_23": 1, "alpha_13": 2}


def test_metric_accepts_rational_strings():
    flag = space("A", 2, [1, 2])
    metric = invariant_metric(flag, ["1/2", 3]).unwrap()
    assert metric.c == (Fraction(1, 2), Fraction(3))


def test_metric_length_and_sign():
    flag = space("A", 2, [1, 2])
    assert isinstance(invariant_metric(flag, [1]), Failure)
    assert isinstance(invariant_metric(flag, [1, 0]), Failure)
    assert isinstance(invariant_metric(flag, [1, "x"]), Failure)


def test_kahler_einstein_flag_a2():
    flag = space("A", 2, [1, 2])
    ke = kahler_einstein_coefficients(flag).unwrap()
    assert ke.c == (Fraction(2), Fraction(2))
    assert sorted(ke.values()) == [2, 2, 4]


def test_kahler_einstein_projective_plane():
    ke = kahler_einstein_coefficients(space("A", 2, [1])).unwrap()
    assert ke.values() == [3, 3]


def test_kahler_einstein_a5_matches_listed_values_up_to_scale():
    a5 = space("A", 5, [2, 4])
    ke = kahler_einstein_coefficients(a5).unwrap()
    listed = invariant_metric(a5, [2, 2]).unwrap()
    assert proportionality_factor(listed, ke) == Some(Fraction(2))
    assert set(listed.values()) == {2, 4}


def test_proportionality_factor_absent():
    flag = space("A", 2, [1, 2])
    first = invariant_metric(flag, [1, 1]).unwrap()
    second = invariant_metric(flag, [1, 2]).unwrap()
    assert proportionality_factor(first, second) == Nothing


def test_implied_coefficients_rejects_non_additive_values():
    flag = space("A", 2, [1, 2])
    g = {root: Fraction(1) for root in flag.delta_phi}
    assert isinstance(implied_coefficients(flag, g), Failure)


def test_describe():
    described = describe(space("B", 2, [1]))
    assert described["family"] == "B"
    assert described["phi"] == [1]
    assert described["n"] == len(described["frame"])


@pytest.mark.parametrize(
    ("family", "rank", "smaller", "larger"),
    [("A", 4, [2], [2, 3]), ("B", 3, [1], [1, 3]), ("D", 4, [1, 2], [1, 2, 4])],
)
def test_frame_grows_with_phi(family, rank, smaller, larger):
    small = space(family, rank, smaller)
    large = space(family, rank, larger)
    assert set(small.delta_phi) < set(large.delta_phi)
    full = space(family, rank, list(range(1, rank + 1)))
    assert set(large.delta_phi) <= set(full.delta_phi)
