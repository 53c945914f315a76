from fractions import Fraction

import pytest
from returns.maybe import Nothing
from returns.result import Failure, Success

from cqblab.core.lie import (
    build_algebra,
    chevalley,
    positive_roots,
    root_by_weight,
    root_coefficients,
    verify_chevalley,
)


@pytest.mark.parametrize(
    ("family", "rank", "roots"),
    [("A", 2, 6), ("A", 4, 20), ("B", 2, 8), ("C", 3, 18), ("D", 4, 24)],
)
def test_root_counts(family, rank, roots):
    alg = build_algebra(family, rank).unwrap()
    assert len(alg.roots) == roots
    assert len(positive_roots(alg)) == roots // 2
    assert len(alg.simple_roots) == rank


def test_unknown_family():
    result = build_algebra("E", 6)
    assert isinstance(result, Failure)
    assert "Unknown Lie family" in result.failure()


@pytest.mark.parametrize(("family", "rank"), [("A", 0), ("C", 2), ("D", 3)])
def test_rank_below_bound(family, rank):
    assert isinstance(build_algebra(family, rank), Failure)


def test_positive_roots_are_ordered():
    alg = build_algebra("A", 3).unwrap()
    coeffs = [root.coeffs for root in positive_roots(alg)]
    assert coeffs == sorted(coeffs)
    assert all(root.is_positive for root in positive_roots(alg))


def test_highest_root_coefficients_a2():
    assert root_coefficients((1, 0, -1), [(1, -1, 0), (0, 1, -1)]) == Success((1, 1))


def test_mixed_sign_weight_is_rejected():
    assert isinstance(root_coefficients((1, -2, 1), [(1, -1, 0), (0, 1, -1)]), Failure)


def test_type_a_pairing_is_one():
    alg = build_algebra("A", 3).unwrap()
    data = chevalley(alg).unwrap()
    assert set(data.z.values()) == {Fraction(1)}


def test_structure_constants_are_antisymmetric():
    alg = build_algebra("A", 2).unwrap()
    data = chevalley(alg).unwrap()
    a1, a2 = alg.simple_roots
    assert data.n(a1, a2) == 1
    assert data.n(a2, a1) == -1
    assert data.n(alg.negative(a1), alg.negative(a2)) == -1


def _delta(x: int, y: int) -> int:
    return int(x == y)


@pytest.mark.parametrize("rank", [2, 3, 4, 5])
def test_type_a_closed_forms(rank):
    # [e_ij, e_kl] = delta_jk e_il - delta_li e_kj
    alg = build_algebra("A", rank).unwrap()
    data = chevalley(alg).unwrap()
    roots = positive_roots(alg)
    for alpha in roots:
        i, j = alpha.pair
        assert data.h_gram[(alpha, alpha)] == 2
        for gamma in roots:
            k, m = gamma.pair
            gram = _delta(i, k) - _delta(i, m) - _delta(j, k) + _delta(j, m)
            assert data.h_gram[(alpha, gamma)] == gram
            assert data.n(alpha, gamma) == _delta(j, k) - _delta(m, i)


def test_non_root_sum_has_zero_constant():
    alg = build_algebra("A", 2).unwrap()
    data = chevalley(alg).unwrap()
    a1 = alg.simple_roots[0]
    assert alg.add(a1, a1) is None
    assert data.n(a1, a1) == 0


@pytest.mark.parametrize(("family", "rank"), [("A", 3), ("B", 2), ("C", 3), ("D", 4)])
def test_verify_chevalley(family, rank):
    alg = build_algebra(family, rank).unwrap()
    data = chevalley(alg).unwrap()
    assert isinstance(verify_chevalley(alg, data), Success)


def test_gram_of_dual_elements_is_symmetric():
    alg = build_algebra("B", 2).unwrap()
    data = chevalley(alg).unwrap()
    for alpha in alg.roots:
        for beta in alg.roots:
            assert data.h_gram[(alpha, beta)] == data.h_gram[(beta, alpha)]


def test_root_by_weight():
    alg = build_algebra("A", 2).unwrap()
    found = root_by_weight(alg, (1, 0, -1)).unwrap()
    assert found.pair == (1, 3)
    assert found.label() == "alpha_13"
    assert root_by_weight(alg, (2, 0, -2)) == Nothing


def test_negative_root():
    alg = build_algebra("C", 3).unwrap()
    for root in alg.roots:
        assert alg.negative(alg.negative(root)) == root
        assert alg.negative(root).weight == tuple(-w for w in root.weight)
