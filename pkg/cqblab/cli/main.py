#!/usr/bin/env python3
"""cqblab command-line driver.

Usage:
    cqblab space --family A --rank 5 --phi 2,4
    cqblab curvature --family A --rank 2 --phi 1,2 --metric c=1,1 --tensor r.json
    cqblab check --family A --rank 5 --phi 2,4 --what cqb --sign pos
    cqblab flow --n 1 --k0 1 --t-max 0.5 --dt 1e-4 --csv run.csv
    cqblab suite --json summary.json

Exit codes: 0 when the requested sign verdict holds (or the command succeeds),
2 when it fails, 1 on error.
"""
import argparse
import json
import logging
import os
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import ValidationError
from returns.result import Failure, Result, Success

from cqblab.core.cspace import (
    build_cspace,
    describe,
    describe_metric,
    invariant_metric,
    kahler_einstein_coefficients,
)
from cqblab.core.curvature import (
    assemble,
    constant_holomorphic_curvature,
    dump_tensor,
    frame_diagonal_report,
    load_tensor,
    symmetry_residual,
)
from cqblab.core.flow import (
    default_constants,
    integrate,
    membership_experiment,
    write_trajectory_csv,
)
from cqblab.core.lie import build_algebra, verify_chevalley
from cqblab.core.positivity import einstein_constant, form_report, q_report
from cqblab.core.rank import rank1_check, rank_k_check
from cqblab.core.reports import provenance, write_json
from cqblab.models.config import AnalysisSettings, Command, JobConfig, Sign, What
from cqblab.models.cspace import CSpace, InvariantMetric
from cqblab.models.curvature import CurvatureTensor
from cqblab.models.positivity import Mode, PositivityReport, Verdict

logger = logging.getLogger(__name__)

SEED_ENV = "CQBLAB_SEED"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERDICT_FAILED = 2

ACCEPTED: dict[Sign, set[Verdict]] = {
    Sign.POS: {Verdict.POSITIVE},
    Sign.NONNEG: {Verdict.POSITIVE, Verdict.NONNEGATIVE_WITH_KERNEL},
    Sign.NEG: {Verdict.NEGATIVE},
    Sign.NONPOS: {Verdict.NEGATIVE, Verdict.NONPOSITIVE_WITH_KERNEL},
}

# flag destination -> JobConfig field
FLAG_FIELDS = {
    "family": "family",
    "rank": "rank",
    "phi": "phi",
    "metric": "metric",
    "what": "what",
    "mode": "mode",
    "rank_limit": "rank_limit",
    "sign": "sign",
    "seed": "seed",
    "tolerance": "tolerance",
    "json": "json_path",
    "csv": "csv_path",
    "tensor": "tensor_path",
    "n": "n",
    "k0": "k0",
    "t_max": "t_max",
    "dt": "dt",
    "monitor_every": "monitor_every",
    "experiment": "experiment",
}


@dataclass(frozen=True, eq=False)
class SpaceTensor:
    space: CSpace
    metric: InvariantMetric
    tensor: CurvatureTensor


def parse_phi(text: str) -> Result[list[int], str]:
    """Comma-separated 1-based fundamental root indices."""
    try:
        phi = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        return Failure(f"Malformed phi list {text!r}; expected e.g. 2,4")
    if not phi:
        return Failure("Phi must name at least one fundamental root")
    return Success(phi)


def parse_metric(space: CSpace, text: str) -> Result[InvariantMetric, str]:
    """`ke` for the Kahler-Einstein metric, else `c=v1,v2,...` with rationals."""
    choice = text.strip()
    if choice.lower() == "ke":
        return kahler_einstein_coefficients(space)
    values = choice.removeprefix("c=").split(",")
    try:
        c = [Fraction(v.strip()) for v in values]
    except (ValueError, ZeroDivisionError):
        return Failure(f"Malformed metric {text!r}; expected ke or c=v1,v2,...")
    return invariant_metric(space, c)


def space_tensor(
    family: str, rank: int, phi: Sequence[int], metric: str
) -> Result[SpaceTensor, str]:
    """Build the C-space, its metric and its curvature tensor."""
    alg = build_algebra(family, rank)
    if isinstance(alg, Failure):
        return alg
    space = build_cspace(alg.unwrap(), phi)
    if isinstance(space, Failure):
        return space
    built = space.unwrap()
    chosen = parse_metric(built, metric)
    if isinstance(chosen, Failure):
        return chosen
    g = chosen.unwrap()
    return assemble(built, g).map(lambda R: SpaceTensor(built, g, R))


def _job_tensor(
    config: JobConfig, read_tensor: bool = True
) -> Result[tuple[CurvatureTensor, dict[str, Any]], str]:
    if read_tensor and config.tensor_path:
        try:
            data = json.loads(Path(config.tensor_path).read_text())
        except (OSError, ValueError) as e:
            return Failure(f"Error reading tensor {config.tensor_path}: {e!s}")
        return load_tensor(data).map(lambda R: (R, {"tensor": config.tensor_path}))
    phi = parse_phi(config.phi)
    if isinstance(phi, Failure):
        return phi
    built = space_tensor(config.family, config.rank, phi.unwrap(), config.metric)
    return built.map(lambda b: (b.tensor, {
        "space": describe(b.space),
        "metric": describe_metric(b.metric),
    }))


def _check(
    R: CurvatureTensor, config: JobConfig, cfg: AnalysisSettings
) -> Result[PositivityReport, str]:
    match config.what:
        case What.CQB:
            return form_report(R, Mode.CQB, cfg)
        case What.DCQB:
            return form_report(R, Mode.DCQB, cfg)
        case What.Q:
            return Success(q_report(R, cfg))
        case What.RANK1:
            return Success(rank1_check(R, config.mode, cfg))
        case What.RANKK:
            if config.rank_limit is None:
                return Failure("rankk needs --rank-limit")
            return rank_k_check(R, config.rank_limit, config.mode, cfg)


def _emit(payload: Any, config: JobConfig) -> Result[str, str]:
    written = write_json(payload, config.json_path)
    if isinstance(written, Success):
        sys.stdout.write(written.unwrap())
    return written


def _fail(message: str) -> int:
    logger.debug("Job failed: %s", message)
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def run_space(config: JobConfig, cfg: AnalysisSettings) -> int:
    phi = parse_phi(config.phi)
    if isinstance(phi, Failure):
        return _fail(phi.failure())
    alg = build_algebra(config.family, config.rank)
    if isinstance(alg, Failure):
        return _fail(alg.failure())
    space = build_cspace(alg.unwrap(), phi.unwrap())
    if isinstance(space, Failure):
        return _fail(space.failure())
    built = space.unwrap()
    verified = verify_chevalley(built.algebra, built.chevalley)
    ke = kahler_einstein_coefficients(built)
    payload = {
        "space": describe(built),
        "chevalley_verified": isinstance(verified, Success),
        "kahler_einstein": ke.map(describe_metric).value_or(None),
        "provenance": provenance(config, cfg),
    }
    if isinstance(verified, Failure):
        payload["chevalley_error"] = verified.failure()
    written = _emit(payload, config)
    return EXIT_OK if isinstance(written, Success) else _fail(written.failure())


def run_curvature(config: JobConfig, cfg: AnalysisSettings) -> int:
    job = _job_tensor(config, read_tensor=False)
    if isinstance(job, Failure):
        return _fail(job.failure())
    R, source = job.unwrap()
    mu = einstein_constant(R, cfg.tolerance)
    payload = {
        "n": R.n,
        "orbits": len(R.components),
        "symmetry_residual": symmetry_residual(R),
        "einstein_constant": mu.value_or(None),
        "frame_diagonal": [row.model_dump() for row in frame_diagonal_report(R)],
        "provenance": provenance(config, cfg, **source),
    }
    if config.tensor_path:
        dumped = write_json(dump_tensor(R), config.tensor_path)
        if isinstance(dumped, Failure):
            return _fail(dumped.failure())
    written = _emit(payload, config)
    return EXIT_OK if isinstance(written, Success) else _fail(written.failure())


def run_check(config: JobConfig, cfg: AnalysisSettings) -> int:
    job = _job_tensor(config)
    if isinstance(job, Failure):
        return _fail(job.failure())
    R, source = job.unwrap()
    report = _check(R, config, cfg)
    if isinstance(report, Failure):
        return _fail(report.failure())
    result = report.unwrap()
    holds = result.verdict in ACCEPTED[config.sign]
    payload = {
        "report": result,
        "requested_sign": config.sign.value,
        "holds": holds,
        "provenance": provenance(config, cfg, **source),
    }
    written = _emit(payload, config)
    if isinstance(written, Failure):
        return _fail(written.failure())
    if not holds:
        logger.info(
            "Verdict %s does not meet %s", result.verdict.value, config.sign.value
        )
    return EXIT_OK if holds else EXIT_VERDICT_FAILED


def run_flow(config: JobConfig, cfg: AnalysisSettings) -> int:
    if config.experiment > 0:
        experiment = membership_experiment(
            count=config.experiment,
            n=config.n,
            seed=config.seed,
            settings=cfg.model_copy(update={"starts": min(cfg.starts, 8)}),
        )
        if isinstance(experiment, Failure):
            return _fail(experiment.failure())
        report = experiment.unwrap()
        payload = {
            "experiment": report,
            "failures": len(report.failures),
            "provenance": provenance(config, cfg),
        }
        written = _emit(payload, config)
        return EXIT_OK if isinstance(written, Success) else _fail(written.failure())
    if config.tensor_path:
        job = _job_tensor(config)
        if isinstance(job, Failure):
            return _fail(job.failure())
        R0 = job.unwrap()[0]
    else:
        R0 = constant_holomorphic_curvature(config.n, config.k0)
    constants = default_constants(R0)
    run = integrate(R0, constants, config.t_max, config.dt, config.monitor_every, cfg)
    if isinstance(run, Failure):
        return _fail(run.failure())
    trajectory = run.unwrap()
    if config.csv_path:
        csv_written = write_trajectory_csv(trajectory, config.csv_path)
        if isinstance(csv_written, Failure):
            return _fail(csv_written.failure())
    final = trajectory.final
    payload = {
        "t_final": final.t,
        "steps": len(trajectory.states) - 1,
        "notice": trajectory.notice,
        "constants": constants,
        "final_membership": final.membership,
        "max_trace_residual": max(s.trace_residual for s in trajectory.states),
        "provenance": provenance(config, cfg),
    }
    if R0.n == 1:
        payload["k_final"] = final.tensor.component(0, 0, 0, 0).real
    written = _emit(payload, config)
    return EXIT_OK if isinstance(written, Success) else _fail(written.failure())


def run(config: JobConfig) -> int:
    """Execute one job and return its exit code."""
    cfg = config.settings()
    logger.debug("Running %s with seed %d", config.command.value, config.seed)
    try:
        match config.command:
            case Command.SPACE:
                return run_space(config, cfg)
            case Command.CURVATURE:
                return run_curvature(config, cfg)
            case Command.CHECK:
                return run_check(config, cfg)
            case Command.FLOW:
                return run_flow(config, cfg)
            case Command.SUITE:
                from cqblab.cli.suite import run_suite

                return run_suite(config, cfg)
    except Exception as e:
        logger.exception("Unexpected error")
        return _fail(f"Error running {config.command.value}: {e!s}")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with JobConfig fields")
    parser.add_argument("--seed", type=int, help=f"Seed (default ${SEED_ENV} or 0)")
    parser.add_argument("--tolerance", type=float, help="Verdict tolerance")
    parser.add_argument("--json", help="Write the JSON report here")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )


def _space_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=["A", "B", "C", "D"])
    parser.add_argument("--rank", type=int)
    parser.add_argument("--phi", help="Comma-separated fundamental roots, e.g. 2,4")
    parser.add_argument("--metric", help="ke or c=v1,v2,... (rationals p/q)")
    parser.add_argument("--tensor", help="Tensor dump JSON; curvature writes it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqblab", description="Curvature positivity of Kahler C-spaces"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    space_parser = subparsers.add_parser("space", help="Describe a C-space")
    _common(space_parser)
    _space_flags(space_parser)

    curvature_parser = subparsers.add_parser("curvature", help="Assemble curvature")
    _common(curvature_parser)
    _space_flags(curvature_parser)

    check_parser = subparsers.add_parser("check", help="Positivity verdict")
    _common(check_parser)
    _space_flags(check_parser)
    check_parser.add_argument("--what", choices=[w.value for w in What])
    check_parser.add_argument("--mode", choices=[m.value for m in Mode])
    check_parser.add_argument("--rank-limit", type=int)
    check_parser.add_argument("--sign", choices=[s.value for s in Sign])

    flow_parser = subparsers.add_parser("flow", help="Reaction ODE run")
    _common(flow_parser)
    flow_parser.add_argument("--tensor", help="Initial tensor dump JSON")
    flow_parser.add_argument("--n", type=int, help="Dimension of the constant model")
    flow_parser.add_argument("--k0", type=float, help="Initial holomorphic curvature")
    flow_parser.add_argument("--t-max", type=float)
    flow_parser.add_argument("--dt", type=float)
    flow_parser.add_argument("--monitor-every", type=int)
    flow_parser.add_argument("--experiment", type=int, help="Run N perturbed starts")
    flow_parser.add_argument("--csv", help="Write the trajectory CSV here")

    suite_parser = subparsers.add_parser("suite", help="Acceptance battery")
    _common(suite_parser)
    return parser


def load_config(
    args: argparse.Namespace, environ: dict[str, str] | None = None
) -> Result[JobConfig, str]:
    """Defaults, then $CQBLAB_SEED, then the config file, then flags."""
    env = os.environ if environ is None else environ
    fields: dict[str, Any] = {}
    if env.get(SEED_ENV):
        try:
            fields["seed"] = int(env[SEED_ENV])
        except ValueError:
            return Failure(f"{SEED_ENV}={env[SEED_ENV]!r} is not an integer")
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as e:
            return Failure(f"Error reading config {args.config}: {e!s}")
        if not isinstance(loaded, dict):
            return Failure(f"Config {args.config} must hold a JSON object")
        fields |= loaded
    for dest, name in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            fields[name] = value
    fields["command"] = args.command
    try:
        return Success(JobConfig(**fields))
    except ValidationError as e:
        return Failure(f"Invalid configuration: {e!s}")


def run_cli(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    config = load_config(args)
    if isinstance(config, Failure):
        return _fail(config.failure())
    return run(config.unwrap())


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
