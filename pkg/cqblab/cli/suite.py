"""Acceptance battery: each criterion reports what it measured and its bound."""
import logging
import sys
from collections.abc import Callable
from functools import cache
from typing import TypeVar

import numpy as np
from returns.result import Failure, Result

from cqblab.cli.main import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_VERDICT_FAILED,
    SpaceTensor,
    space_tensor,
)
from cqblab.core.cspace import invariant_metric, proportionality_factor
from cqblab.core.curvature import (
    constant_holomorphic_curvature,
    frame_diagonal_report,
    holomorphic_sectional,
    mostow_siu_model,
    product,
    random_kahler_operator,
    ricci,
    scaled,
    tensor_norm,
)
from cqblab.core.flow import default_constants, integrate, membership_experiment
from cqblab.core.positivity import (
    cqb_value,
    dcqb_value,
    einstein_constant,
    form_report,
    form_scale,
    ke_shortcut,
    mostow_siu_pq,
    product_decomposition_check,
)
from cqblab.core.rank import brute_force_rank1, rank1_check
from cqblab.core.reports import provenance, write_json
from cqblab.models.config import AnalysisSettings, JobConfig
from cqblab.models.curvature import CurvatureTensor, MostowSiuParams
from cqblab.models.flow import FlowConstants
from cqblab.models.positivity import Mode, PositivityReport, Verdict
from cqblab.models.suite import CriterionResult, SuiteReport

logger = logging.getLogger(__name__)

RICCI_TOL = 1e-9
STRICT_MARGIN = 1e-6
IDENTITY_TOL = 1e-10
ORACLE_TOL = 1e-6
FLOW_TOL = 1e-6
TRACE_TOL = 1e-12
RANDOM_MAPS = 100

# (family, rank, phi, metric)
FLAG_A2 = ("A", 2, (1, 2), "c=1,1")
FLAG_A3 = ("A", 3, (1, 2, 3), "c=1,1,1")
FLAG_A4 = ("A", 4, (1, 2, 3, 4), "c=1,1,1,1")
A5_24 = ("A", 5, (2, 4), "ke")
P2 = ("A", 2, (1,), "ke")
P3 = ("A", 3, (1,), "ke")
EXAMPLES = (FLAG_A2, FLAG_A3, FLAG_A4, A5_24, P2, P3)


T = TypeVar("T")


def _get(result: Result[T, str]) -> T:
    if isinstance(result, Failure):
        raise ValueError(result.failure())
    return result.unwrap()


@cache
def _example(key: tuple[str, int, tuple[int, ...], str]) -> SpaceTensor:
    family, rank, phi, metric = key
    return _get(space_tensor(family, rank, phi, metric))


def _name(key: tuple[str, int, tuple[int, ...], str]) -> str:
    family, rank, phi, metric = key
    return f"{family}{rank}{{{','.join(map(str, phi))}}}:{metric}"


def _ricci_error(R: CurvatureTensor, mu: float) -> float:
    return float(np.max(np.abs(ricci(R).entries - mu * np.eye(R.n))))


def _report(R: CurvatureTensor, mode: Mode, cfg: AnalysisSettings) -> PositivityReport:
    return _get(form_report(R, mode, cfg))


def _random_maps(n: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for _ in range(RANDOM_MAPS)
    ]


def flag_a2(cfg: AnalysisSettings) -> CriterionResult:
    example = _example(FLAG_A2)
    R = example.tensor
    g = {root.label(): str(example.metric.g[root]) for root in example.space.delta_phi}
    g_ok = g == {"alpha_12": "1", "alpha_23": "1", "alpha_13": "2"}
    cqb = _report(R, Mode.CQB, cfg)
    dcqb = _report(R, Mode.DCQB, cfg)
    simple = [i for i, root in enumerate(example.space.delta_phi) if root.height == 1]
    kernel = min(
        abs(_get(cqb_value(R, np.outer(np.eye(R.n)[a], np.eye(R.n)[a]))))
        for a in simple
    )
    ric_err = _ricci_error(R, 2.0)
    return CriterionResult(
        number=1,
        name="flag SU(3)/T: Einstein, CQB kernel on a simple root, dCQB positive",
        passed=g_ok
        and ric_err <= RICCI_TOL
        and abs(cqb.min_value) <= cfg.tolerance
        and kernel <= cfg.tolerance
        and dcqb.min_value > cfg.tolerance,
        measured={
            "g": g,
            "ricci_error": ric_err,
            "cqb_min": cqb.min_value,
            "simple_root_witness_value": kernel,
            "dcqb_min": dcqb.min_value,
        },
        tolerance=cfg.tolerance,
    )


def full_flags(cfg: AnalysisSettings) -> CriterionResult:
    measured = {}
    passed = True
    for key in (FLAG_A3, FLAG_A4):
        R = _example(key).tensor
        cqb = _report(R, Mode.CQB, cfg)
        dcqb = _report(R, Mode.DCQB, cfg)
        ric_err = _ricci_error(R, 2.0)
        measured[_name(key)] = {
            "ricci_error": ric_err,
            "cqb_min": cqb.min_value,
            "dcqb_min": dcqb.min_value,
        }
        passed &= (
            ric_err <= RICCI_TOL
            and abs(cqb.min_value) <= cfg.tolerance
            and dcqb.min_value > STRICT_MARGIN
        )
    return CriterionResult(
        number=2,
        name="flags SU(4)/T, SU(5)/T: CQB nonnegative with kernel, dCQB positive",
        passed=passed,
        measured=measured,
        tolerance=cfg.tolerance,
    )


def a5_kahler_einstein(cfg: AnalysisSettings) -> CriterionResult:
    example = _example(A5_24)
    R = example.tensor
    listed = _get(invariant_metric(example.space, [2, 2]))
    factor = proportionality_factor(listed, example.metric)
    mu = einstein_constant(R, RICCI_TOL)
    cqb = _report(R, Mode.CQB, cfg)
    dcqb = _report(R, Mode.DCQB, cfg)
    cqb_norm = cqb.min_value / form_scale(R, Mode.CQB)
    dcqb_norm = dcqb.min_value / form_scale(R, Mode.DCQB)
    return CriterionResult(
        number=3,
        name="SU(6)/S(U(2)xU(2)xU(2)) with its Kahler-Einstein metric",
        passed=factor.value_or(None) is not None
        and mu.value_or(None) is not None
        and cqb_norm > STRICT_MARGIN
        and dcqb_norm > STRICT_MARGIN,
        measured={
            "global_factor": str(factor.value_or(None)),
            "mu": mu.value_or(None),
            "cqb_min_normalized": cqb_norm,
            "dcqb_min_normalized": dcqb_norm,
        },
        tolerance=STRICT_MARGIN,
    )


def ke_identity(cfg: AnalysisSettings) -> CriterionResult:
    measured = {}
    worst = 0.0
    for key in EXAMPLES:
        R = _example(key).tensor
        shortcut = ke_shortcut(R, RICCI_TOL)
        if shortcut.predicted_cqb_min is None or shortcut.predicted_dcqb_min is None:
            raise ValueError(f"{_name(key)} is not Einstein")
        cqb_err = abs(_report(R, Mode.CQB, cfg).min_value - shortcut.predicted_cqb_min)
        dcqb_err = abs(
            _report(R, Mode.DCQB, cfg).min_value - shortcut.predicted_dcqb_min
        )
        measured[_name(key)] = {"cqb_error": cqb_err, "dcqb_error": dcqb_err}
        worst = max(worst, cqb_err, dcqb_err)
    return CriterionResult(
        number=4,
        name="Kahler-Einstein shortcut: form minima from mu, lambda_1, lambda_N",
        passed=worst <= cfg.tolerance,
        measured=measured,
        tolerance=cfg.tolerance,
    )


def projective_spaces(cfg: AnalysisSettings) -> CriterionResult:
    measured = {}
    passed = True
    rng = np.random.default_rng(cfg.seed)
    for key in (P2, P3):
        R = _example(key).tensor
        values = [row.holomorphic_sectional for row in frame_diagonal_report(R)]
        for _ in range(20):
            v = rng.standard_normal(R.n) + 1j * rng.standard_normal(R.n)
            values.append(_get(holomorphic_sectional(R, v)))
        spread = max(values) - min(values)
        cqb = _report(R, Mode.CQB, cfg)
        dcqb = _report(R, Mode.DCQB, cfg)
        measured[_name(key)] = {
            "holomorphic_sectional_spread": spread,
            "cqb_verdict": cqb.verdict.value,
            "dcqb_verdict": dcqb.verdict.value,
        }
        passed &= (
            spread <= IDENTITY_TOL
            and cqb.verdict is Verdict.POSITIVE
            and dcqb.verdict is Verdict.POSITIVE
        )
    return CriterionResult(
        number=5,
        name="projective spaces: constant holomorphic sectional curvature",
        passed=passed,
        measured=measured,
        tolerance=IDENTITY_TOL,
    )


def orthogonal_ricci_bound(cfg: AnalysisSettings) -> CriterionResult:
    measured = {}
    passed = True
    for key in EXAMPLES:
        R = _example(key).tensor
        rank1 = rank1_check(R, Mode.CQB, cfg)
        if rank1.min_value < -cfg.tolerance:
            measured[_name(key)] = {"rank1_min": rank1.min_value, "checked": False}
            continue
        gap = min(row.perp_gap for row in frame_diagonal_report(R))
        measured[_name(key)] = {"rank1_min": rank1.min_value, "min_perp_gap": gap}
        passed &= gap >= -STRICT_MARGIN
    return CriterionResult(
        number=6,
        name="(n-1) Ric >= orthogonal Ricci wherever rank-one CQB >= 0",
        passed=passed,
        measured=measured,
        tolerance=STRICT_MARGIN,
    )


def mostow_siu(cfg: AnalysisSettings) -> CriterionResult:
    params = MostowSiuParams(n=2, b=2, c=1, e=2)
    R = mostow_siu_model(params)
    cqb = _report(R, Mode.CQB, cfg)
    dcqb = _report(R, Mode.DCQB, cfg)
    worst = 0.0
    for a in _random_maps(params.n, cfg.seed):
        p, q = mostow_siu_pq(params, a)
        worst = max(
            worst,
            abs(_get(cqb_value(R, a)) + (p - q)),
            abs(_get(dcqb_value(R, a)) + (p + q)),
        )
    return CriterionResult(
        number=7,
        name="Mostow-Siu model: both forms negative definite, P +/- Q identity",
        passed=params.negative_regime
        and cqb.max_value < -STRICT_MARGIN
        and dcqb.max_value < -STRICT_MARGIN
        and worst <= IDENTITY_TOL,
        measured={
            "cqb_max": cqb.max_value,
            "dcqb_max": dcqb.max_value,
            "identity_error": worst,
        },
        tolerance=IDENTITY_TOL,
    )


def product_check(cfg: AnalysisSettings) -> CriterionResult:
    R1 = _example(FLAG_A2).tensor
    R = product(R1, R1)
    cqb = _report(R, Mode.CQB, cfg)
    worst = max(
        _get(product_decomposition_check(R1, R1, a))
        for a in _random_maps(R.n, cfg.seed)
    )
    return CriterionResult(
        number=8,
        name="product of two flags: CQB kernel and block decomposition",
        passed=abs(cqb.min_value) <= cfg.tolerance and worst <= IDENTITY_TOL,
        measured={"cqb_min": cqb.min_value, "decomposition_residual": worst},
        tolerance=IDENTITY_TOL,
    )


def oracle_agreement(cfg: AnalysisSettings) -> CriterionResult:
    measured = {}
    worst = 0.0
    for n in (2, 3):
        for seed in range(10):
            R = random_kahler_operator(n, cfg.seed + seed)
            for mode in Mode:
                found = rank1_check(R, mode, cfg).min_value
                grid = _get(brute_force_rank1(R, mode, settings=cfg)).min_value
                measured[f"{mode.value},n={n},seed={cfg.seed + seed}"] = {
                    "alternating": found,
                    "grid": grid,
                }
                worst = max(worst, abs(found - grid))
    return CriterionResult(
        number=9,
        name="rank-one search agrees with the grid oracle",
        passed=worst <= ORACLE_TOL,
        measured={"worst_difference": worst, "runs": measured},
        tolerance=ORACLE_TOL,
    )


def flow_checks(cfg: AnalysisSettings) -> CriterionResult:
    one = constant_model_run(cfg)
    trace = 0.0
    for seed in range(5):
        R = random_kahler_operator(3, cfg.seed + seed)
        R = scaled(R, 1 / tensor_norm(R))
        constants = FlowConstants(D1=4, E1=0, D2=2, E2=1, epsilon=1)
        run = _get(integrate(R, constants, 0.01, 1e-3, monitor_every=0, settings=cfg))
        trace = max(trace, *(s.trace_residual for s in run.states))
    experiment = _get(
        membership_experiment(settings=cfg.model_copy(update={"starts": 8}))
    )
    failures = [row.seed for row in experiment.failures]
    if failures:
        logger.warning("Membership left C(t) for seeds %s", failures)
    return CriterionResult(
        number=10,
        name="reaction ODE: closed form, trace identity, membership experiment",
        passed=abs(one - 2.0) <= FLOW_TOL and trace <= TRACE_TOL,
        measured={
            "k_at_half": one,
            "max_trace_residual": trace,
            "experiment_runs": len(experiment.rows),
            "experiment_failures": failures,
            "experiment_min_margin32": min(r.min_margin32 for r in experiment.rows),
        },
        tolerance=FLOW_TOL,
    )


def constant_model_run(cfg: AnalysisSettings) -> float:
    """k(0.5) for the one-dimensional flow from k(0) = 1."""
    R0 = constant_holomorphic_curvature(1, 1.0)
    run = _get(
        integrate(R0, default_constants(R0), 0.5, 1e-4, monitor_every=0, settings=cfg)
    )
    return run.final.tensor.component(0, 0, 0, 0).real


CRITERIA: list[tuple[int, str, Callable[[AnalysisSettings], CriterionResult]]] = [
    (1, "flag SU(3)/T", flag_a2),
    (2, "flags SU(4)/T and SU(5)/T", full_flags),
    (3, "SU(6)/S(U(2)^3)", a5_kahler_einstein),
    (4, "Kahler-Einstein shortcut", ke_identity),
    (5, "projective spaces", projective_spaces),
    (6, "orthogonal Ricci bound", orthogonal_ricci_bound),
    (7, "Mostow-Siu model", mostow_siu),
    (8, "product", product_check),
    (9, "rank-one oracle", oracle_agreement),
    (10, "reaction ODE", flow_checks),
]


def suite(settings: AnalysisSettings | None = None) -> SuiteReport:
    """Run every criterion; an exception inside one marks only that one failed."""
    cfg = settings or AnalysisSettings()
    results = []
    for number, name, check in CRITERIA:
        try:
            results.append(check(cfg))
        except Exception as e:
            logger.warning("Criterion %d raised: %s", number, e)
            results.append(CriterionResult(
                number=number,
                name=name,
                passed=False,
                tolerance=cfg.tolerance,
                detail=f"Error running criterion: {e!s}",
            ))
        logger.info("Criterion %d: %s", number, results[-1].passed)
    return SuiteReport(criteria=results)


def format_table(report: SuiteReport) -> str:
    lines = [f"{'#':>3}  {'result':6}  {'tolerance':>9}  name"]
    for c in report.criteria:
        status = "pass" if c.passed else "FAIL"
        lines.append(f"{c.number:>3}  {status:6}  {c.tolerance:>9.1e}  {c.name}")
        if c.detail:
            lines.append(f"{'':>3}  {c.detail}")
    return "\n".join(lines) + "\n"


def run_suite(config: JobConfig, settings: AnalysisSettings) -> int:
    report = suite(settings)
    sys.stdout.write(format_table(report))
    if config.json_path:
        payload = {"summary": report, "passed": report.passed}
        payload["provenance"] = provenance(config, settings)
        written = write_json(payload, config.json_path)
        if isinstance(written, Failure):
            print(f"error: {written.failure()}", file=sys.stderr)
            return EXIT_ERROR
    return EXIT_OK if report.passed else EXIT_VERDICT_FAILED
