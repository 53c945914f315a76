"""Curvature functionals as Hermitian forms and their sign verdicts.

For a linear map A with entries A[a, c]:

    CQB(A)  = sum Ric_cd A_ac conj(A_ad) - sum R_abcd A_ac conj(A_bd)
    dCQB(A) = sum Ric_cd conj(A_ac) A_ad + sum R_abcd conj(A_ac) A_bd

On the n^2 pairs (a, c) both are Hermitian matrices M with entries
delta_ab Ric_cd -/+ R_abcd. The dCQB value is vec(A)^dagger M vec(A); the CQB
value is vec(A)^T M conj(vec(A)), so an eigenvector v of the CQB matrix is
attained at A = conj(v).
"""
import logging
import math

import numpy as np
from returns.maybe import Maybe, Nothing, Some
from returns.result import Failure, Result, Success

from cqblab.core.curvature import product, ricci, symmetric_pairs
from cqblab.core.eigen import EigenResult, hermitian_residual, jacobi_eigh
from cqblab.models.config import AnalysisSettings
from cqblab.models.curvature import CurvatureTensor, MostowSiuParams
from cqblab.models.positivity import (
    KECriteria,
    KEShortcut,
    LinearMap,
    Method,
    Mode,
    PositivityReport,
    QuadraticFormMatrix,
    Verdict,
    Witness,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-9
CONSISTENCY_TOL = 1e-10
CONSISTENCY_SAMPLES = 100


def _as_map(R: CurvatureTensor, A: LinearMap | np.ndarray) -> Result[np.ndarray, str]:
    a = A.entries if isinstance(A, LinearMap) else np.asarray(A, dtype=complex)
    if a.shape != (R.n, R.n):
        return Failure(f"Linear map of shape {a.shape} for a frame of dimension {R.n}")
    return Success(a.astype(complex))


def _real(value: complex, scale: float, what: str) -> Result[float, str]:
    if abs(value.imag) > 1e-12 * max(1.0, scale):
        return Failure(f"{what} has imaginary residue {value.imag:.3e}")
    return Success(float(value.real))


def cqb_value(R: CurvatureTensor, A: LinearMap | np.ndarray) -> Result[float, str]:
    """Cross quadratic bisectional curvature evaluated on a linear map."""
    checked = _as_map(R, A)
    if isinstance(checked, Failure):
        return checked
    a = checked.unwrap()
    arr = R.to_array()
    value = np.einsum("cd,ac,ad->", ricci(R).entries, a, a.conj()) - np.einsum(
        "abcd,ac,bd->", arr, a, a.conj()
    )
    scale = R.n**2 * float(np.max(np.abs(arr), initial=0.0) * np.sum(np.abs(a) ** 2))
    return _real(complex(value), scale, "CQB value")


def dcqb_value(R: CurvatureTensor, A: LinearMap | np.ndarray) -> Result[float, str]:
    """Dual cross quadratic bisectional curvature evaluated on a linear map."""
    checked = _as_map(R, A)
    if isinstance(checked, Failure):
        return checked
    a = checked.unwrap()
    arr = R.to_array()
    value = np.einsum("cd,ac,ad->", ricci(R).entries, a.conj(), a) + np.einsum(
        "abcd,ac,bd->", arr, a.conj(), a
    )
    scale = R.n**2 * float(np.max(np.abs(arr), initial=0.0) * np.sum(np.abs(a) ** 2))
    return _real(complex(value), scale, "dCQB value")


def form_value(R: CurvatureTensor, mode: Mode, A: np.ndarray) -> Result[float, str]:
    return cqb_value(R, A) if mode is Mode.CQB else dcqb_value(R, A)


def _form_entries(R: CurvatureTensor, mode: Mode) -> np.ndarray:
    n = R.n
    sign = -1.0 if mode is Mode.CQB else 1.0
    m = np.einsum("ab,cd->acbd", np.eye(n), ricci(R).entries)
    m = m + sign * R.to_array().transpose(0, 2, 1, 3)
    return m.reshape(n * n, n * n)


def effective_matrix(form: QuadraticFormMatrix, mode: Mode) -> np.ndarray:
    """Matrix E with value(A) = vec(A)^dagger E vec(A)."""
    return form.entries.conj() if mode is Mode.CQB else form.entries


def _self_check(R: CurvatureTensor, mode: Mode, m: np.ndarray) -> Result[None, str]:
    residual = hermitian_residual(m)
    if residual > HERMITIAN_TOL:
        return Failure(f"{mode.value} form is not Hermitian (residue {residual:.3e})")
    rng = np.random.default_rng(0)
    eff = m.conj() if mode is Mode.CQB else m
    for _ in range(CONSISTENCY_SAMPLES):
        a = rng.standard_normal((R.n, R.n)) + 1j * rng.standard_normal((R.n, R.n))
        v = a.reshape(-1)
        from_form = float(np.real(v.conj() @ eff @ v))
        direct = form_value(R, mode, a)
        if isinstance(direct, Failure):
            return Failure(direct.failure())
        value = direct.unwrap()
        if abs(from_form - value) > CONSISTENCY_TOL * max(1.0, abs(value)):
            return Failure(
                f"{mode.value} form disagrees with direct evaluation: "
                f"{from_form} vs {value}"
            )
    return Success(None)


def build_form(R: CurvatureTensor, mode: Mode) -> Result[QuadraticFormMatrix, str]:
    try:
        m = _form_entries(R, mode)
        checked = _self_check(R, mode, m)
        if isinstance(checked, Failure):
            return checked
        labels = tuple((a, c) for a in range(R.n) for c in range(R.n))
        return Success(QuadraticFormMatrix(entries=m, basis_labels=labels))
    except Exception as e:
        return Failure(f"Error building {mode.value} form: {e!s}")


def cqb_form(R: CurvatureTensor) -> Result[QuadraticFormMatrix, str]:
    """The n^2 x n^2 Hermitian matrix delta_ab Ric_cd - R_abcd."""
    return build_form(R, Mode.CQB)


def dcqb_form(R: CurvatureTensor) -> Result[QuadraticFormMatrix, str]:
    """The n^2 x n^2 Hermitian matrix delta_ab Ric_cd + R_abcd."""
    return build_form(R, Mode.DCQB)


def q_operator(R: CurvatureTensor) -> QuadraticFormMatrix:
    """Curvature operator on the symmetric square of the tangent space.

    The basis is e_a . e_a and sqrt(2) e_a . e_c for a < c, orthonormal for
    the induced metric, and <Q(X.Y), conj(Z.W)> = R(X, conj Z, Y, conj W).
    """
    pairs = symmetric_pairs(R.n)
    scale = np.array([1.0 if a == c else math.sqrt(2) for a, c in pairs])
    rows = np.array([a for a, _ in pairs])
    cols = np.array([c for _, c in pairs])
    arr = R.to_array()
    # Q[(a, c), (b, d)] = s_ac s_bd R_abcd
    block = arr[rows[:, None], rows[None, :], cols[:, None], cols[None, :]]
    q = scale[:, None] * scale[None, :] * block
    return QuadraticFormMatrix(entries=q, basis_labels=tuple(pairs))


def form_eigen(form: QuadraticFormMatrix) -> EigenResult:
    return jacobi_eigh(form.entries)


def form_scale(R: CurvatureTensor, mode: Mode) -> float:
    """Largest entry of the form matrix, used to normalize verdicts."""
    return float(np.max(np.abs(_form_entries(R, mode)), initial=0.0))


def verdict(min_value: float, max_value: float, scale: float, tol: float) -> Verdict:
    """Classify a form from its extreme values, normalized by scale.

    Args:
        min_value: Smallest value over the unit sphere
        max_value: Largest value over the unit sphere
        scale: Normalization, the largest matrix entry
        tol: Borderline band

    Returns:
        The sign verdict
    """
    s = scale if scale > 0 else 1.0
    lo, hi = min_value / s, max_value / s
    if hi < -tol:
        return Verdict.NEGATIVE
    if lo > tol:
        return Verdict.POSITIVE
    if lo >= -tol:
        return Verdict.NONNEGATIVE_WITH_KERNEL
    if hi <= tol:
        return Verdict.NONPOSITIVE_WITH_KERNEL
    return Verdict.INDEFINITE


def einstein_constant(R: CurvatureTensor, tol: float = 1e-9) -> Maybe[float]:
    """mu when Ric = mu * Id within tol, else Nothing."""
    ric = ricci(R).entries
    mu = float(np.real(np.trace(ric))) / R.n
    if np.max(np.abs(ric - mu * np.eye(R.n))) <= tol * max(1.0, abs(mu)):
        return Some(mu)
    return Nothing


def ke_criteria(
    mu: float, lambda1: float, lambda_n: float, tol: float = 1e-8
) -> KECriteria:
    """Positivity of CQB and dCQB for an Einstein metric.

    CQB > 0 iff mu > lambda_N, and dCQB > 0 iff lambda_1 > -mu; a gap within
    tol is reported as borderline.
    """
    cqb_gap = mu - lambda_n
    dcqb_gap = lambda1 + mu
    return KECriteria(
        cqb_positive=cqb_gap > tol,
        dcqb_positive=dcqb_gap > tol,
        cqb_borderline=abs(cqb_gap) <= tol,
        dcqb_borderline=abs(dcqb_gap) <= tol,
    )


def ke_shortcut(R: CurvatureTensor, tol: float = 1e-9) -> KEShortcut:
    """Extreme Q eigenvalues and the form minima they predict for Einstein R."""
    eig = form_eigen(q_operator(R))
    lam1, lam_n = eig.min, eig.max
    mu = einstein_constant(R, tol).value_or(None)
    return KEShortcut(
        mu=mu,
        lambda1=lam1,
        lambdaN=lam_n,
        predicted_cqb_min=None if mu is None else min(mu, mu - lam_n),
        predicted_dcqb_min=None if mu is None else mu + min(lam1, 0.0),
    )


def form_report(
    R: CurvatureTensor, mode: Mode, settings: AnalysisSettings | None = None
) -> Result[PositivityReport, str]:
    """Eigenvalue verdict of the full CQB or dCQB form.

    Args:
        R: Curvature tensor
        mode: Which form
        settings: Tolerance and related settings

    Returns:
        Result containing the report, with a linear map attaining the minimum
    """
    cfg = settings or AnalysisSettings()
    built = build_form(R, mode)
    if isinstance(built, Failure):
        return built
    form = built.unwrap()
    eig = form_eigen(form)
    v = eig.vectors[:, 0]
    witness = (v.conj() if mode is Mode.CQB else v).reshape(R.n, R.n)
    warnings = []
    if not eig.converged:
        warnings.append("eigensolver did not converge")
    check = form_value(R, mode, witness)
    if isinstance(check, Success) and abs(check.unwrap() - eig.min) > 1e-8 * max(
        1.0, abs(eig.min)
    ):
        warnings.append(f"witness re-evaluates to {check.unwrap()}")
    shortcut = ke_shortcut(R)
    scale = float(np.max(np.abs(form.entries), initial=0.0))
    return Success(PositivityReport(
        what=mode.value,
        mode=mode,
        rank_limit=R.n,
        verdict=verdict(eig.min, eig.max, scale, cfg.tolerance),
        min_value=eig.min,
        max_value=eig.max,
        mu=shortcut.mu,
        lambda1=shortcut.lambda1,
        lambdaN=shortcut.lambdaN,
        witness=Witness.from_matrix(witness),
        tolerance=cfg.tolerance,
        method=Method.EIGEN,
        converged=eig.converged,
        warnings=warnings,
    ))


def q_report(
    R: CurvatureTensor, settings: AnalysisSettings | None = None
) -> PositivityReport:
    """Sign verdict of the Q operator itself, with its extreme eigenvalues."""
    cfg = settings or AnalysisSettings()
    form = q_operator(R)
    eig = form_eigen(form)
    mu = einstein_constant(R).value_or(None)
    scale = float(np.max(np.abs(form.entries), initial=0.0))
    return PositivityReport(
        what="q",
        verdict=verdict(eig.min, eig.max, scale, cfg.tolerance),
        min_value=eig.min,
        max_value=eig.max,
        mu=mu,
        lambda1=eig.min,
        lambdaN=eig.max,
        tolerance=cfg.tolerance,
        method=Method.EIGEN,
        converged=eig.converged,
    )


def mostow_siu_pq(params: MostowSiuParams, A: np.ndarray) -> tuple[float, float]:
    """The quantities P and Q with CQB = -(P - Q) and dCQB = -(P + Q) on the model."""
    a = np.asarray(A, dtype=complex)
    n, b, c, e = params.n, params.b, params.c, params.e
    sq = np.abs(a) ** 2
    p = (b + (n - 1) * c) * float(np.sum(sq[:, 0])) + (c + n * e) * float(
        np.sum(sq[:, 1:])
    )
    q = b * float(sq[0, 0])
    for i in range(1, n):
        q += 2 * e * float(sq[i, i])
        q += c * abs(a[0, i] + a[i, 0]) ** 2
        for k in range(i + 1, n):
            q += e * abs(a[i, k] + a[k, i]) ** 2
    return p, q


def product_decomposition_check(
    R1: CurvatureTensor, R2: CurvatureTensor, A: np.ndarray
) -> Result[float, str]:
    """Residual of the block decomposition of CQB on a product.

    CQB of the product equals CQB of each diagonal block plus the Ricci
    cross terms of the two off-diagonal blocks.
    """
    n1, n2 = R1.n, R2.n
    a = np.asarray(A, dtype=complex)
    if a.shape != (n1 + n2, n1 + n2):
        return Failure(
            f"Linear map of shape {a.shape} for a product of dimension {n1 + n2}"
        )
    whole = cqb_value(product(R1, R2), a)
    first = cqb_value(R1, a[:n1, :n1])
    second = cqb_value(R2, a[n1:, n1:])
    for part in (whole, first, second):
        if isinstance(part, Failure):
            return part
    ric1, ric2 = ricci(R1).entries, ricci(R2).entries
    # A[alpha, i]: alpha in the second factor, i, j in the first
    cross1 = np.einsum("ij,ai,aj->", ric1, a[n1:, :n1], a[n1:, :n1].conj())
    cross2 = np.einsum("ab,ia,ib->", ric2, a[:n1, n1:], a[:n1, n1:].conj())
    residual = whole.unwrap() - first.unwrap() - second.unwrap() - float(
        np.real(cross1 + cross2)
    )
    return Success(abs(residual))
