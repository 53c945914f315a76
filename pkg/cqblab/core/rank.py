"""Rank-restricted positivity by alternating least-eigenvector iteration.

A rank-one map is A = X (x) Y, on which the forms reduce to

    F(X, Y) = |X|^2 Ric(Y, conj Y) -/+ R(X, conj X, Y, conj Y).

Fixing one factor leaves a Hermitian form in the other, minimized by a least
eigenvector. Rank k uses A = X Y^T with n x k blocks, one block at a time.
Maxima are minima of the same functional on -R.
"""
import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from returns.result import Failure, Result, Success
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from cqblab.core.curvature import ricci
from cqblab.core.positivity import (
    build_form,
    effective_matrix,
    form_report,
    form_scale,
    form_value,
    verdict,
)
from cqblab.models.config import AnalysisSettings
from cqblab.models.curvature import CurvatureTensor
from cqblab.models.positivity import Method, Mode, PositivityReport, Witness

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 3


@dataclass(frozen=True, eq=False)
class Run:
    """Outcome of one alternating minimization from one start."""
    value: float
    x: np.ndarray
    y: np.ndarray
    start: int
    iterations: int
    converged: bool


def _sign(mode: Mode) -> float:
    return -1.0 if mode is Mode.CQB else 1.0


def _x_form(arr: np.ndarray, ric: np.ndarray, y: np.ndarray, sign: float) -> np.ndarray:
    # F = x^T L conj(x)
    ric_y = float(np.real(y @ ric @ y.conj()))
    return ric_y * np.eye(len(y)) + sign * np.einsum("abcd,c,d->ab", arr, y, y.conj())


def _y_form(arr: np.ndarray, ric: np.ndarray, x: np.ndarray, sign: float) -> np.ndarray:
    # F = y^T K conj(y)
    x_sq = float(np.real(x.conj() @ x))
    return x_sq * ric + sign * np.einsum("abcd,a,b->cd", arr, x, x.conj())


def biquadratic(
    arr: np.ndarray, ric: np.ndarray, x: np.ndarray, y: np.ndarray, sign: float
) -> float:
    """F(X, Y) for unnormalized X, Y."""
    return float(np.real(y @ _y_form(arr, ric, x, sign) @ y.conj()))


def _least(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of M^T; v^T M conj(v) = lambda for each unit eigenvector v."""
    return np.linalg.eigh(m.T)


def _alternate(
    arr: np.ndarray,
    ric: np.ndarray,
    sign: float,
    x: np.ndarray,
    y: np.ndarray,
    start: int,
    cfg: AnalysisSettings,
) -> Run:
    value = math.inf
    for iteration in range(1, cfg.max_alternations + 1):
        _, vx = _least(_x_form(arr, ric, y, sign))
        x = vx[:, 0]
        wy, vy = _least(_y_form(arr, ric, x, sign))
        y = vy[:, 0]
        new = float(wy[0])
        if len(wy) > 1 and wy[1] - wy[0] <= cfg.degeneracy * max(1.0, abs(wy[0])):
            # look one x-step ahead on both branches of the degenerate pair
            ahead = [
                float(_least(_x_form(arr, ric, vy[:, j], sign))[0][0]) for j in (0, 1)
            ]
            y = vy[:, int(np.argmin(ahead))]
        if abs(value - new) <= cfg.relative_change * max(1.0, abs(new)):
            return Run(new, x, y, start, iteration, True)
        value = new
    return Run(value, x, y, start, cfg.max_alternations, False)


def start_points(n: int, count: int, seed: int, blocks: int = 2) -> np.ndarray:
    """Seeded low-discrepancy complex start vectors, shape (count, blocks, n)."""
    sampler = qmc.Halton(d=2 * blocks * n, scramble=True, seed=seed)
    u = np.clip(sampler.random(count), 1e-12, 1 - 1e-12)
    z = norm.ppf(u).reshape(count, blocks, 2, n)
    v = z[:, :, 0, :] + 1j * z[:, :, 1, :]
    return v / np.linalg.norm(v, axis=2, keepdims=True)


def _run_all(tasks: Sequence[Callable[[], Run]], workers: int) -> list[Run]:
    if workers <= 1:
        runs = [task() for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda task: task(), tasks))
    return sorted(runs, key=lambda r: (r.value, r.start))


def _rank1_minimum(
    arr: np.ndarray, ric: np.ndarray, mode: Mode, cfg: AnalysisSettings
) -> Run:
    n = arr.shape[0]
    sign = _sign(mode)
    points = start_points(n, cfg.starts, cfg.seed)
    basis = np.eye(n, dtype=complex)
    starts = [(points[i, 0], points[i, 1]) for i in range(cfg.starts)]
    starts += [(basis[a], basis[a]) for a in range(n)]

    def task(i: int, x0: np.ndarray, y0: np.ndarray) -> Callable[[], Run]:
        return lambda: _alternate(arr, ric, sign, x0, y0, i, cfg)

    runs = _run_all([task(i, x0, y0) for i, (x0, y0) in enumerate(starts)], cfg.workers)
    best = runs[0]
    logger.debug(
        "rank-1 %s: best %.6e from start %d after %d steps",
        mode.value, best.value, best.start, best.iterations,
    )
    return best


def rank1_map(x: np.ndarray, y: np.ndarray, mode: Mode) -> np.ndarray:
    """The rank-one linear map on which the form equals F(X, Y)."""
    a = np.outer(x, y)
    return a if mode is Mode.CQB else a.conj()


def rank1_extremes(
    R: CurvatureTensor, mode: Mode, settings: AnalysisSettings | None = None
) -> tuple[Run, Run]:
    """Minimizing runs of F on R and on -R."""
    cfg = settings or AnalysisSettings()
    arr = R.to_array()
    ric = ricci(R).entries
    return _rank1_minimum(arr, ric, mode, cfg), _rank1_minimum(-arr, -ric, mode, cfg)


def _witness(
    a: np.ndarray, x: np.ndarray | None = None, y: np.ndarray | None = None
) -> Witness:
    fields = Witness.from_matrix(a).model_dump(exclude_none=True)
    if x is not None and y is not None:
        fields |= Witness.from_vectors(x, y).model_dump(exclude_none=True)
    return Witness(**fields)


def rank1_check(
    R: CurvatureTensor, mode: Mode, settings: AnalysisSettings | None = None
) -> PositivityReport:
    """Sign of the form restricted to rank-one maps.

    Args:
        R: Curvature tensor
        mode: CQB (minus sign) or dCQB (plus sign)
        settings: Tolerance, multistart and stopping settings

    Returns:
        Report with min and max over unit X, Y and the minimizing pair
    """
    cfg = settings or AnalysisSettings()
    low, high = rank1_extremes(R, mode, cfg)
    warnings = []
    if not (low.converged and high.converged):
        warnings.append(
            f"alternation stopped at {cfg.max_alternations} steps; best value reported"
        )
        logger.warning("rank-1 %s search did not converge", mode.value)
    return PositivityReport(
        what="rank1",
        mode=mode,
        rank_limit=1,
        verdict=verdict(low.value, -high.value, form_scale(R, mode), cfg.tolerance),
        min_value=low.value,
        max_value=-high.value,
        witness=_witness(rank1_map(low.x, low.y, mode), low.x, low.y),
        tolerance=cfg.tolerance,
        method=Method.ALTERNATING,
        converged=low.converged and high.converged,
        warnings=warnings,
    )


@dataclass(frozen=True, eq=False)
class BlockRun:
    value: float
    x: np.ndarray
    y: np.ndarray
    converged: bool

    @property
    def a(self) -> np.ndarray:
        return self.x @ self.y.T


def _block_step(eff: np.ndarray, n: int, x: np.ndarray, y: np.ndarray) -> BlockRun:
    # fix Y (orthonormal columns), solve for X
    q, r = np.linalg.qr(y)
    x, y = x @ r.T, q
    lift = np.kron(np.eye(n), y)
    _, v = np.linalg.eigh(lift.conj().T @ eff @ lift)
    x = v[:, 0].reshape(n, -1)
    # fix X (orthonormal columns), solve for Y
    q, r = np.linalg.qr(x)
    x, y = q, y @ r.T
    lift = np.kron(x, np.eye(n))
    w, v = np.linalg.eigh(lift.conj().T @ eff @ lift)
    y = v[:, 0].reshape(-1, n).T
    return BlockRun(float(w[0]), x, y, False)


def _block_minimize(
    eff: np.ndarray, n: int, x: np.ndarray, y: np.ndarray, cfg: AnalysisSettings
) -> BlockRun:
    value = math.inf
    run = BlockRun(value, x, y, False)
    for _ in range(cfg.max_alternations):
        run = _block_step(eff, n, run.x, run.y)
        if abs(value - run.value) <= cfg.relative_change * max(1.0, abs(run.value)):
            return BlockRun(run.value, run.x, run.y, True)
        value = run.value
    return run


def _rank_k_minimum(
    eff: np.ndarray, n: int, k: int, warm: BlockRun, cfg: AnalysisSettings
) -> BlockRun:
    count = max(1, min(cfg.starts, 16))
    points = start_points(n * k, count, cfg.seed + k)
    x0 = np.hstack([warm.x, 1e-3 * points[0, 0, :n, None]])
    y0 = np.hstack([warm.y, points[0, 1, :n, None]])
    runs = [_block_minimize(eff, n, x0, y0, cfg)]
    for i in range(count):
        runs.append(_block_minimize(
            eff, n, points[i, 0].reshape(n, k), points[i, 1].reshape(n, k), cfg
        ))
    best = min(runs, key=lambda r: r.value)
    if warm.value < best.value:
        return BlockRun(warm.value, np.hstack([warm.x, np.zeros((n, 1))]),
                        np.hstack([warm.y, np.zeros((n, 1))]), warm.converged)
    return best


def _as_block(run: Run, mode: Mode) -> BlockRun:
    x, y = (run.x, run.y) if mode is Mode.CQB else (run.x.conj(), run.y.conj())
    return BlockRun(run.value, x[:, None], y[:, None], run.converged)


def rank_k_check(
    R: CurvatureTensor,
    k: int,
    mode: Mode,
    settings: AnalysisSettings | None = None,
) -> Result[PositivityReport, str]:
    """Sign of the form restricted to maps of rank at most k.

    Rank k starts from the rank k-1 witness, so reported minima never
    increase with k. k = n is the full eigenvalue problem and k = 1 the
    rank-one search.

    Args:
        R: Curvature tensor
        k: Rank bound, 1 <= k <= n
        mode: CQB or dCQB
        settings: Tolerance, multistart and stopping settings

    Returns:
        Result containing the report or an error message
    """
    cfg = settings or AnalysisSettings()
    n = R.n
    if not 1 <= k <= n:
        return Failure(f"Rank bound {k} outside 1..{n}")
    if k == n:
        return form_report(R, mode, cfg).map(
            lambda report: report.model_copy(update={"what": "rankk", "rank_limit": k})
        )
    if k == 1:
        return Success(rank1_check(R, mode, cfg))
    built = build_form(R, mode)
    if isinstance(built, Failure):
        return built
    eff = effective_matrix(built.unwrap(), mode)
    low_run, high_run = rank1_extremes(R, mode, cfg)
    low, high = _as_block(low_run, mode), _as_block(high_run, mode)
    for rank in range(2, k + 1):
        low = _rank_k_minimum(eff, n, rank, low, cfg)
        high = _rank_k_minimum(-eff, n, rank, high, cfg)
    a = low.a / np.linalg.norm(low.a)
    warnings = []
    check = form_value(R, mode, a)
    if isinstance(check, Success) and abs(check.unwrap() - low.value) > 1e-8 * max(
        1.0, abs(low.value)
    ):
        warnings.append(f"witness re-evaluates to {check.unwrap()}")
    return Success(PositivityReport(
        what="rankk",
        mode=mode,
        rank_limit=k,
        verdict=verdict(low.value, -high.value, form_scale(R, mode), cfg.tolerance),
        min_value=low.value,
        max_value=-high.value,
        witness=_witness(a),
        tolerance=cfg.tolerance,
        method=Method.ALTERNATING,
        converged=low.converged and high.converged,
        warnings=warnings,
    ))


def sphere_grid(n: int, points: int) -> np.ndarray:
    """Unit vectors modulo phase: real first coordinate, angles on a grid."""
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    theta = np.linspace(0.0, math.pi / 2, points)
    phi = np.linspace(0.0, 2 * math.pi, points, endpoint=False)
    if n == 2:
        t, p = np.meshgrid(theta, phi, indexing="ij")
        return np.stack(
            [np.cos(t), np.sin(t) * np.exp(1j * p)], axis=-1
        ).reshape(-1, 2).astype(complex)
    t1, t2, p1, p2 = np.meshgrid(theta, theta, phi, phi, indexing="ij")
    return np.stack(
        [
            np.cos(t1).astype(complex),
            np.sin(t1) * np.cos(t2) * np.exp(1j * p1),
            np.sin(t1) * np.sin(t2) * np.exp(1j * p2),
        ],
        axis=-1,
    ).reshape(-1, 3)


def _polish(
    arr: np.ndarray, ric: np.ndarray, sign: float, x: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    n = len(x)

    def split(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return z[:n] + 1j * z[n : 2 * n], z[2 * n : 3 * n] + 1j * z[3 * n :]

    def objective(z: np.ndarray) -> float:
        u, v = split(z)
        scale = float(np.real(u.conj() @ u) * np.real(v.conj() @ v))
        return biquadratic(arr, ric, u, v, sign) / max(scale, 1e-300)

    z0 = np.concatenate([x.real, x.imag, y.real, y.imag])
    result = minimize(objective, z0, method="BFGS")
    u, v = split(result.x)
    return float(result.fun), u / np.linalg.norm(u), v / np.linalg.norm(v)


def brute_force_rank1(
    R: CurvatureTensor,
    mode: Mode,
    points_per_axis: int | None = None,
    polish: int = 32,
    settings: AnalysisSettings | None = None,
) -> Result[PositivityReport, str]:
    """Grid oracle for the rank-one extremes on small frames.

    Args:
        R: Curvature tensor with n <= 3
        mode: CQB or dCQB
        points_per_axis: Grid points per angle; 10 for n <= 2, 6 for n = 3
        polish: How many grid rows are refined with BFGS, best first
        settings: Tolerance settings

    Returns:
        Result containing the report or an error message
    """
    cfg = settings or AnalysisSettings()
    n = R.n
    if n > BRUTE_FORCE_MAX_N:
        return Failure(f"Grid oracle is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    try:
        points = points_per_axis or (10 if n <= 2 else 6)
        grid = sphere_grid(n, points)
        arr = R.to_array()
        ric = ricci(R).entries
        sign = _sign(mode)
        partial = np.einsum("abcd,ia,ib->icd", arr, grid, grid.conj())
        values = np.real(
            np.einsum("cd,jc,jd->j", ric, grid, grid.conj())[None, :]
            + sign * np.einsum("icd,jc,jd->ij", partial, grid, grid.conj())
        )

        def refine(
            a: np.ndarray, r: np.ndarray, flat: np.ndarray
        ) -> tuple[float, np.ndarray, np.ndarray]:
            # one start per X row keeps the polished starts in distinct basins
            best = (math.inf, grid[0], grid[0])
            partner = np.argmin(flat, axis=1)
            row_min = flat[np.arange(len(flat)), partner]
            for i in np.argsort(row_min)[:polish]:
                found = _polish(a, r, sign, grid[i], grid[partner[i]])
                if found[0] < best[0]:
                    best = found
            return best

        low = refine(arr, ric, values)
        high = refine(-arr, -ric, -values)
        return Success(PositivityReport(
            what="rank1",
            mode=mode,
            rank_limit=1,
            verdict=verdict(low[0], -high[0], form_scale(R, mode), cfg.tolerance),
            min_value=low[0],
            max_value=-high[0],
            witness=_witness(rank1_map(low[1], low[2], mode), low[1], low[2]),
            tolerance=cfg.tolerance,
            method=Method.BRUTE_FORCE,
        ))
    except Exception as e:
        return Failure(f"Error running grid oracle: {e!s}")
