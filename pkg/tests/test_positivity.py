from fractions import Fraction

import numpy as np
import pytest
from returns.maybe import Nothing
from returns.result import Failure

from cqblab.cli.main import space_tensor
from cqblab.core.positivity import (
    build_form,
    cqb_form,
    cqb_value,
    dcqb_form,
    dcqb_value,
    effective_matrix,
    einstein_constant,
    form_report,
    ke_criteria,
    ke_shortcut,
    mostow_siu_pq,
    product_decomposition_check,
    q_operator,
    q_report,
    verdict,
)
from cqblab.models.curvature import MostowSiuParams
from cqblab.models.positivity import Mode, Verdict


@pytest.mark.parametrize(
    ("low", "high", "expected"),
    [
        (1.0, 2.0, Verdict.POSITIVE),
        (0.0, 1.0, Verdict.NONNEGATIVE_WITH_KERNEL),
        (-1.0, 1.0, Verdict.INDEFINITE),
        (-2.0, -1.0, Verdict.NEGATIVE),
        (-1.0, 0.0, Verdict.NONPOSITIVE_WITH_KERNEL),
        (0.0, 0.0, Verdict.NONNEGATIVE_WITH_KERNEL),
    ],
)
def test_verdict(low, high, expected):
    assert verdict(low, high, 1.0, 1e-8) is expected


def test_verdict_is_normalized_by_scale():
    assert verdict(1e-3, 1.0, 1e3, 1e-8) is Verdict.POSITIVE
    assert verdict(1e-6, 1.0, 1e3, 1e-8) is Verdict.NONNEGATIVE_WITH_KERNEL


def test_flag_a2_cqb_has_kernel(flag_a2):
    report = form_report(flag_a2.tensor, Mode.CQB).unwrap()
    assert abs(report.min_value) <= 1e-8
    assert report.verdict is Verdict.NONNEGATIVE_WITH_KERNEL
    assert report.mu == pytest.approx(2.0)


def test_flag_a2_dcqb_is_positive(flag_a2):
    report = form_report(flag_a2.tensor, Mode.DCQB).unwrap()
    assert report.min_value > 1e-6
    assert report.verdict is Verdict.POSITIVE


def test_simple_root_witness(flag_a2):
    simple = [
        i for i, root in enumerate(flag_a2.space.delta_phi) if root.height == 1
    ]
    e = np.eye(3)
    values = [cqb_value(flag_a2.tensor, np.outer(e[a], e[a])).unwrap() for a in simple]
    assert min(abs(v) for v in values) <= 1e-12


def test_projective_plane_is_positive(p2):
    cqb = form_report(p2.tensor, Mode.CQB).unwrap()
    dcqb = form_report(p2.tensor, Mode.DCQB).unwrap()
    assert cqb.verdict is Verdict.POSITIVE
    assert dcqb.verdict is Verdict.POSITIVE
    assert cqb.min_value == pytest.approx(1 / 3)
    assert dcqb.min_value == pytest.approx(1.0)


def test_mostow_siu_is_negative(mostow):
    for mode in Mode:
        report = form_report(mostow, mode).unwrap()
        assert report.verdict is Verdict.NEGATIVE
        assert report.max_value < -1e-6


def test_witness_reevaluates(flag_a2, random_operator):
    for R in (flag_a2.tensor, random_operator):
        for mode in Mode:
            report = form_report(R, mode).unwrap()
            assert not report.warnings
            a = report.witness.matrix()
            value = cqb_value(R, a) if mode is Mode.CQB else dcqb_value(R, a)
            assert value.unwrap() == pytest.approx(report.min_value, abs=1e-9)


def test_effective_matrix_gives_the_form(random_operator):
    rng = np.random.default_rng(1)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    v = a.reshape(-1)
    for mode, direct in ((Mode.CQB, cqb_value), (Mode.DCQB, dcqb_value)):
        form = build_form(random_operator, mode).unwrap()
        eff = effective_matrix(form, mode)
        assert form.dim == 9
        assert np.real(v.conj() @ eff @ v) == pytest.approx(
            direct(random_operator, a).unwrap()
        )


def test_wrong_shape_is_rejected(p2):
    assert isinstance(cqb_value(p2.tensor, np.eye(3)), Failure)
    assert isinstance(dcqb_value(p2.tensor, np.eye(1)), Failure)


def test_q_operator_of_projective_plane(p2):
    q = q_operator(p2.tensor)
    assert q.dim == 3
    assert np.allclose(q.entries, (2 / 3) * np.eye(3))
    report = q_report(p2.tensor)
    assert report.lambda1 == pytest.approx(2 / 3)
    assert report.verdict is Verdict.POSITIVE


@pytest.mark.parametrize("name", ["flag_a2", "p2"])
def test_kahler_einstein_shortcut(name, request):
    R = request.getfixturevalue(name).tensor
    shortcut = ke_shortcut(R)
    cqb = form_report(R, Mode.CQB).unwrap()
    dcqb = form_report(R, Mode.DCQB).unwrap()
    assert abs(cqb.min_value - shortcut.predicted_cqb_min) <= 1e-8
    assert abs(dcqb.min_value - shortcut.predicted_dcqb_min) <= 1e-8


def test_ke_criteria():
    criteria = ke_criteria(mu=1.0, lambda1=2 / 3, lambda_n=2 / 3)
    assert criteria.cqb_positive
    assert criteria.dcqb_positive
    border = ke_criteria(mu=2.0, lambda1=1.0, lambda_n=2.0)
    assert border.cqb_borderline
    assert not border.cqb_positive


def test_einstein_constant(p2, mostow):
    assert einstein_constant(p2.tensor).unwrap() == pytest.approx(1.0)
    assert einstein_constant(mostow) == Nothing


def test_mostow_siu_identity(mostow):
    params = MostowSiuParams(n=2, b=2, c=1, e=2)
    assert params.negative_regime
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        p, q = mostow_siu_pq(params, a)
        assert cqb_value(mostow, a).unwrap() == pytest.approx(-(p - q), abs=1e-10)
        assert dcqb_value(mostow, a).unwrap() == pytest.approx(-(p + q), abs=1e-10)


def test_product_decomposition(flag_a2):
    rng = np.random.default_rng(2)
    R = flag_a2.tensor
    for _ in range(10):
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        assert product_decomposition_check(R, R, a).unwrap() <= 1e-10
    assert isinstance(product_decomposition_check(R, R, np.eye(3)), Failure)


def test_named_forms_are_hermitian_on_all_index_pairs(flag_a2):
    for form in (cqb_form(flag_a2.tensor), dcqb_form(flag_a2.tensor)):
        m = form.unwrap()
        assert m.entries.shape == (9, 9)
        assert len(m.basis_labels) == 9
        assert np.allclose(m.entries, m.entries.conj().T)


def test_identity_map_values(flag_a2):
    identity = np.eye(3)
    assert cqb_value(flag_a2.tensor, identity).unwrap() == pytest.approx(1.0)
    assert dcqb_value(flag_a2.tensor, identity).unwrap() == pytest.approx(11.0)


@pytest.mark.parametrize("factor", ["1/2", "2", "5"])
@pytest.mark.parametrize("mode", list(Mode))
def test_verdict_survives_scaling_the_metric(flag_a2, factor, mode):
    scaled_metric = f"c={factor},{factor}"
    R = space_tensor("A", 2, [1, 2], scaled_metric).unwrap().tensor
    base = form_report(flag_a2.tensor, mode).unwrap()
    report = form_report(R, mode).unwrap()
    assert report.verdict is base.verdict
    assert report.max_value == pytest.approx(base.max_value / Fraction(factor))
    assert report.min_value == pytest.approx(
        base.min_value / Fraction(factor), abs=1e-10
    )
