"""Reaction ODE of the Kahler-Ricci flow on curvature tensors.

The diffusion term is dropped, leaving the pointwise system

    dR_abcd/dt = sum_pq R_ab pq R_cd qp + R_ad pq R_cb qp - R_ap cq R_pb qd

(indices alternate holomorphic and conjugate slots). Runs are monitored
against the convex sets C(t) cut out by a Ricci lower bound, a
Ricci/curvature mixing bound and a norm bound.
"""
import csv
import logging
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from returns.result import Failure, Result, Success

from cqblab.core.curvature import (
    add,
    constant_holomorphic_curvature,
    random_kahler_operator,
    ricci,
    scaled,
    tensor_from_array,
    tensor_norm,
)
from cqblab.core.rank import start_points
from cqblab.models.config import AnalysisSettings
from cqblab.models.curvature import CurvatureTensor, HermitianTensor2
from cqblab.models.flow import (
    ExperimentReport,
    ExperimentRow,
    FlowConstants,
    FlowState,
    Membership,
    Trajectory,
)

logger = logging.getLogger(__name__)

BLOW_UP_FACTOR = 1e3
TRAJECTORY_COLUMNS = (
    "t",
    "norm_R",
    "min_ricci_eig",
    "c31",
    "c32",
    "c33",
    "margin32",
    "margin33",
)


def _reaction(arr: np.ndarray) -> np.ndarray:
    return (
        np.einsum("abpq,cdqp->abcd", arr, arr)
        + np.einsum("adpq,cbqp->abcd", arr, arr)
        - np.einsum("apcq,pbqd->abcd", arr, arr)
    )


def _ricci_reaction(arr: np.ndarray) -> np.ndarray:
    return np.einsum("abpq,qp->ab", arr, np.einsum("abcc->ab", arr))


def _trace_residual(arr: np.ndarray, derivative: np.ndarray) -> float:
    traced = np.einsum("abcc->ab", derivative)
    return float(np.max(np.abs(traced - _ricci_reaction(arr)), initial=0.0))


def reaction_derivative(R: CurvatureTensor) -> CurvatureTensor:
    """dR/dt of the reaction ODE at R."""
    return tensor_from_array(_reaction(R.to_array()), R.frame_labels)


def ricci_derivative(R: CurvatureTensor) -> HermitianTensor2:
    """dRic/dt computed directly as sum_pq R_ab pq Ric_qp."""
    return HermitianTensor2(n=R.n, entries=_ricci_reaction(R.to_array()))


def default_constants(R0: CurvatureTensor) -> FlowConstants:
    """D1 = (n-1)^2, D2 = 2|R0|, E2 = 1, E1 = 100 n D1^2 D2 and epsilon = 1/E1."""
    n = R0.n
    d1 = float((n - 1) ** 2)
    norm = tensor_norm(R0)
    d2 = 2 * norm if norm > 0 else 1.0
    e1 = 100 * n * d1**2 * d2
    return FlowConstants(
        D1=d1, E1=e1, D2=d2, E2=1.0, epsilon=1 / e1 if e1 > 0 else 1.0
    )


def _mixing(
    arr: np.ndarray,
    ric: np.ndarray,
    d: float,
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
) -> tuple[float, complex]:
    w = x @ (ric - np.einsum("abcd,c,d->ab", arr, z, z.conj())) @ y.conj()
    rx = float(np.real(x @ ric @ x.conj()))
    ry = float(np.real(y @ ric @ y.conj()))
    return abs(w) ** 2 - d * rx * ry, complex(w)


def _top(m: np.ndarray) -> np.ndarray:
    # v^T M conj(v) is largest at the top eigenvector of M^T
    return np.linalg.eigh(m.T)[1][:, -1]


def _mixing_ascent(
    arr: np.ndarray,
    ric: np.ndarray,
    d: float,
    start: np.ndarray,
    cfg: AnalysisSettings,
) -> float:
    x, y, z = start
    value, w = _mixing(arr, ric, d, x, y, z)
    for _ in range(cfg.max_alternations):
        m = ric - np.einsum("abcd,c,d->ab", arr, z, z.conj())
        ry = float(np.real(y @ ric @ y.conj()))
        u = m @ y.conj()
        x = _top(np.outer(u, u.conj()) - d * ry * ric)
        rx = float(np.real(x @ ric @ x.conj()))
        v = m.T @ x
        y = _top(np.outer(v.conj(), v) - d * rx * ric)
        _, w = _mixing(arr, ric, d, x, y, z)
        phase = w / abs(w) if abs(w) > 0 else 1.0
        s = np.einsum("abcd,a,b->cd", arr, x, y.conj())
        h = (np.conj(phase) * s + phase * s.conj().T) / 2
        z = np.linalg.eigh(h.T)[1][:, 0]
        new, w = _mixing(arr, ric, d, x, y, z)
        if abs(new - value) <= cfg.relative_change * max(1.0, abs(new)):
            return new
        value = new
    return value


def mixing_sup(
    R: CurvatureTensor, d: float, settings: AnalysisSettings | None = None
) -> float:
    """Estimate sup |Ric(X, conj Y) - R(X, conj Y, Z, conj Z)|^2 - d Ric(X) Ric(Y).

    The sup runs over unit X, Y, Z and is approached by multistart
    alternating ascent, so the result is a lower estimate.
    """
    cfg = settings or AnalysisSettings()
    arr = R.to_array()
    ric = ricci(R).entries
    points = start_points(R.n, cfg.starts, cfg.seed, blocks=3)
    return max(_mixing_ascent(arr, ric, d, p, cfg) for p in points)


def membership_at(
    t: float,
    R: CurvatureTensor,
    constants: FlowConstants,
    settings: AnalysisSettings | None = None,
) -> Membership:
    """Evaluate the three conditions of C(t) on R."""
    cfg = settings or AnalysisSettings()
    tol = cfg.tolerance
    margin31 = float(np.linalg.eigvalsh(ricci(R).entries)[0])
    margin32 = -mixing_sup(R, constants.D1 + t * constants.E1, cfg)
    margin33 = constants.D2 + t * constants.E2 - tensor_norm(R)
    return Membership(
        c31=margin31 >= -tol,
        c32=margin32 >= -tol,
        c33=margin33 >= -tol,
        margin31=margin31,
        margin32=margin32,
        margin33=margin33,
    )


def membership(
    state: FlowState, settings: AnalysisSettings | None = None
) -> Membership:
    return membership_at(state.t, state.tensor, state.constants, settings)


def integrate(
    R0: CurvatureTensor,
    constants: FlowConstants,
    t_max: float,
    dt: float | None = None,
    monitor_every: int = 1,
    settings: AnalysisSettings | None = None,
) -> Result[Trajectory, str]:
    """Classical RK4 on the reaction ODE, sampled every step.

    Args:
        R0: Initial curvature tensor
        constants: Constants of C(t); t_max may not exceed epsilon
        t_max: End time
        dt: Step size, 1e-3 / (1 + |R0|) by default; shrunk to divide t_max
        monitor_every: Membership is evaluated every this many steps;
            0 evaluates only the first and last states
        settings: Tolerance and multistart settings for membership

    Returns:
        Result containing the trajectory; a run stopped by the blow-up guard
        or by non-finite values carries a notice and ends at the last good state
    """
    cfg = settings or AnalysisSettings()
    norm0 = tensor_norm(R0)
    step = dt if dt is not None else 1e-3 / (1 + norm0)
    if step <= 0 or t_max <= 0:
        return Failure(f"Step {step} and end time {t_max} must be positive")
    if t_max > constants.epsilon * (1 + 1e-12):
        return Failure(f"End time {t_max} exceeds epsilon = {constants.epsilon}")
    if constants.E1 > 0 and constants.epsilon > 1 / constants.E1 * (1 + 1e-12):
        return Failure(f"epsilon = {constants.epsilon} exceeds 1/E1")
    steps = max(1, math.ceil(t_max / step - 1e-9))
    h = t_max / steps
    labels = R0.frame_labels

    def sample(i: int, arr: np.ndarray, residual: float, last: bool) -> FlowState:
        t = i * h
        tensor = tensor_from_array(arr, labels)
        monitored = (monitor_every > 0 and i % monitor_every == 0) or (
            monitor_every == 0 and (i == 0 or last)
        )
        return FlowState(
            t=t,
            tensor=tensor,
            constants=constants,
            membership=membership_at(t, tensor, constants, cfg) if monitored else None,
            trace_residual=residual,
        )

    arr = R0.to_array().astype(complex)
    states = [sample(0, arr, 0.0, steps == 0)]
    notice = None
    for i in range(1, steps + 1):
        residual = 0.0
        stages = []
        for weight, base in ((0.0, None), (0.5, 0), (0.5, 1), (1.0, 2)):
            point = arr if base is None else arr + weight * h * stages[base]
            k = _reaction(point)
            residual = max(residual, _trace_residual(point, k))
            stages.append(k)
        new = arr + h / 6 * (stages[0] + 2 * stages[1] + 2 * stages[2] + stages[3])
        if not np.all(np.isfinite(new)):
            notice = f"non-finite curvature at t={i * h:.6g}; kept last good state"
            break
        if norm0 > 0 and np.linalg.norm(new) > BLOW_UP_FACTOR * norm0:
            notice = f"|R| exceeded {BLOW_UP_FACTOR:g} |R0| at t={i * h:.6g}"
            break
        arr = new
        states.append(sample(i, arr, residual, i == steps))
    if notice is not None:
        logger.warning("Flow truncated: %s", notice)
        last = states[-1]
        if last.membership is None:
            states[-1] = FlowState(
                t=last.t,
                tensor=last.tensor,
                constants=constants,
                membership=membership(last, cfg),
                trace_residual=last.trace_residual,
            )
    logger.debug("Flow n=%d: %d steps of %.3e", R0.n, len(states) - 1, h)
    return Success(Trajectory(states=states, notice=notice))


def convexity_check(
    R: CurvatureTensor,
    S: CurvatureTensor,
    eta_grid: Sequence[float],
    constants: FlowConstants,
    t: float = 0.0,
    settings: AnalysisSettings | None = None,
) -> Result[bool, str]:
    """Whether eta R + (1 - eta) S stays in C(t) for every eta in the grid.

    Args:
        R: A tensor inside C(t)
        S: Another tensor inside C(t), same dimension
        eta_grid: Mixing weights in [0, 1]
        constants: Constants of C(t)
        t: Time at which C(t) is taken
        settings: Tolerance and multistart settings

    Returns:
        Result containing the conjunction, or an error when an endpoint is
        outside C(t)
    """
    cfg = settings or AnalysisSettings()
    if R.n != S.n:
        return Failure(f"Tensors of dimensions {R.n} and {S.n} cannot be mixed")
    for name, tensor in (("R", R), ("S", S)):
        found = membership_at(t, tensor, constants, cfg)
        if not found.inside:
            return Failure(f"{name} is not inside C({t}): {found.model_dump()}")
    inside = True
    for eta in eta_grid:
        mixed = add(scaled(R, eta), scaled(S, 1 - eta))
        found = membership_at(t, mixed, constants, cfg)
        if not found.inside:
            logger.warning("Convex combination eta=%s leaves C(%s)", eta, t)
            inside = False
    return Success(inside)


def perturbed_fubini_study(
    n: int, seed: int, size: float = 0.05, k: float = 1.0
) -> CurvatureTensor:
    """Constant holomorphic curvature k plus a seeded perturbation of norm size."""
    base = constant_holomorphic_curvature(n, k)
    noise = random_kahler_operator(n, seed)
    return add(base, scaled(noise, size * tensor_norm(base) / tensor_norm(noise)))


def membership_experiment(
    count: int = 20,
    n: int = 2,
    seed: int = 0,
    steps: int = 20,
    monitor_every: int = 5,
    perturbation: float = 0.05,
    settings: AnalysisSettings | None = None,
) -> Result[ExperimentReport, str]:
    """Run perturbed Fubini-Study tensors up to t = epsilon and record membership.

    Constants come from default_constants of each starting tensor. Failures
    are listed in the report rather than raised.
    """
    cfg = settings or AnalysisSettings(starts=8)
    rows = []
    for i in range(count):
        R0 = perturbed_fubini_study(n, seed + i, perturbation)
        constants = default_constants(R0)
        run = integrate(
            R0,
            constants,
            constants.epsilon,
            constants.epsilon / steps,
            monitor_every,
            cfg,
        )
        if isinstance(run, Failure):
            return run
        trajectory = run.unwrap()
        checked = [s for s in trajectory.states if s.membership is not None]
        marks = [s.membership for s in checked if s.membership is not None]
        failures = [s for s in checked if s.membership and not s.membership.inside]
        failed_conditions = sorted({
            name
            for s in failures
            if s.membership
            for name in ("c31", "c32", "c33")
            if not getattr(s.membership, name)
        })
        rows.append(ExperimentRow(
            seed=seed + i,
            norm_r0=tensor_norm(R0),
            initially_inside=marks[0].inside,
            inside_throughout=not failures,
            first_failure_t=failures[0].t if failures else None,
            failed_conditions=failed_conditions,
            min_margin31=min(m.margin31 for m in marks),
            min_margin32=min(m.margin32 for m in marks),
            min_margin33=min(m.margin33 for m in marks),
            t_end=trajectory.final.t,
            notice=trajectory.notice,
        ))
        if failures:
            logger.warning(
                "Seed %d left C(t) at t=%.3e (%s)",
                seed + i, failures[0].t, ",".join(failed_conditions),
            )
    return Success(ExperimentReport(n=n, count=count, rows=rows))


def trajectory_rows(trajectory: Trajectory) -> list[dict[str, str]]:
    rows = []
    for state in trajectory.states:
        m = state.membership
        rows.append({
            "t": repr(state.t),
            "norm_R": repr(tensor_norm(state.tensor)),
            "min_ricci_eig": repr(
                float(np.linalg.eigvalsh(ricci(state.tensor).entries)[0])
            ),
            "c31": "" if m is None else str(m.c31).lower(),
            "c32": "" if m is None else str(m.c32).lower(),
            "c33": "" if m is None else str(m.c33).lower(),
            "margin32": "" if m is None else repr(m.margin32),
            "margin33": "" if m is None else repr(m.margin33),
        })
    return rows


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> Result[Path, str]:
    """Write one CSV row per state; membership cells are empty where unmonitored."""
    target = Path(path)
    try:
        with target.open("w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=TRAJECTORY_COLUMNS)
            writer.writeheader()
            writer.writerows(trajectory_rows(trajectory))
        return Success(target)
    except OSError as e:
        return Failure(f"Error writing trajectory to {target}: {e!s}")
