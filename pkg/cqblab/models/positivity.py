from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field


class Mode(str, Enum):
    """Which curvature functional a check is about."""
    CQB = "cqb"
    DCQB = "dcqb"


class Method(str, Enum):
    EIGEN = "eigen"
    ALTERNATING = "alternating"
    BRUTE_FORCE = "brute_force"


class Verdict(str, Enum):
    """Sign verdict of a Hermitian form."""
    POSITIVE = "positive"
    NONNEGATIVE_WITH_KERNEL = "nonnegative_with_kernel"
    INDEFINITE = "indefinite"
    NEGATIVE = "negative"
    NONPOSITIVE_WITH_KERNEL = "nonpositive_with_kernel"


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map between the conjugate and holomorphic tangent spaces.

    entries[a, c] is the coefficient of frame vector e_c in A(conj e_a) for
    CQB, or of conj e_c in A(e_a) for dCQB.
    """
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def rank(self, tol: float = 1e-10) -> int:
        s = np.linalg.svd(self.entries, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True, eq=False)
class QuadraticFormMatrix:
    """Hermitian matrix of a curvature form on a labelled basis.

    basis_labels holds index pairs (a, c): all n^2 pairs for the CQB and dCQB
    forms, the pairs a <= c for the Q operator.
    """
    entries: np.ndarray
    basis_labels: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


class Witness(BaseModel):
    """Where a reported extreme value is attained.

    Either a full linear map (real and imaginary parts) or a pair of unit
    vectors X, Y with A = X (x) Y.
    """
    matrix_re: list[list[float]] | None = None
    matrix_im: list[list[float]] | None = None
    x_re: list[float] | None = None
    x_im: list[float] | None = None
    y_re: list[float] | None = None
    y_im: list[float] | None = None

    @classmethod
    def from_matrix(cls, a: np.ndarray) -> "Witness":
        return cls(matrix_re=np.real(a).tolist(), matrix_im=np.imag(a).tolist())

    @classmethod
    def from_vectors(cls, x: np.ndarray, y: np.ndarray) -> "Witness":
        return cls(
            x_re=np.real(x).tolist(),
            x_im=np.imag(x).tolist(),
            y_re=np.real(y).tolist(),
            y_im=np.imag(y).tolist(),
        )

    def matrix(self) -> np.ndarray | None:
        if self.matrix_re is None or self.matrix_im is None:
            return None
        return np.array(self.matrix_re) + 1j * np.array(self.matrix_im)

    def vectors(self) -> tuple[np.ndarray, np.ndarray] | None:
        if self.x_re is None or self.x_im is None:
            return None
        if self.y_re is None or self.y_im is None:
            return None
        x = np.array(self.x_re) + 1j * np.array(self.x_im)
        y = np.array(self.y_re) + 1j * np.array(self.y_im)
        return x, y


class PositivityReport(BaseModel):
    """Outcome of a positivity check, in report-file form."""
    what: str
    mode: Mode | None = None
    rank_limit: int | None = None
    verdict: Verdict
    min_value: float
    max_value: float
    mu: float | None = None
    lambda1: float | None = None
    lambdaN: float | None = None  # noqa: N815
    witness: Witness | None = None
    tolerance: float
    method: Method
    converged: bool = True
    warnings: list[str] = Field(default_factory=list)


class KECriteria(BaseModel):
    """Positivity read off from mu and the extreme eigenvalues of Q."""
    cqb_positive: bool
    dcqb_positive: bool
    cqb_borderline: bool
    dcqb_borderline: bool


class KEShortcut(BaseModel):
    mu: float | None
    lambda1: float
    lambdaN: float  # noqa: N815
    predicted_cqb_min: float | None
    predicted_dcqb_min: float | None
