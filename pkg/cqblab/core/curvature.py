"""Curvature tensors of Kahler C-spaces and synthetic curvature models.

C-space tensors are assembled in the Chevalley frame with exact rational
arithmetic and then moved to the unitary frame e_alpha = E_alpha / sqrt(g z),
which introduces square roots, so stored components are complex floats.
"""
import logging
import math
from collections.abc import Iterable
from fractions import Fraction
from itertools import combinations
from typing import Any

import numpy as np
from returns.result import Failure, Result, Success

from cqblab.models.cspace import CSpace, InvariantMetric
from cqblab.models.curvature import (
    CurvatureTensor,
    FrameDiagonalRow,
    HermitianTensor2,
    Index4,
    MostowSiuParams,
    canonical,
)
from cqblab.models.lie import Family, Root

logger = logging.getLogger(__name__)


def tensor_from_entries(
    n: int,
    entries: Iterable[tuple[Index4, complex]],
    frame_labels: tuple[str, ...] | None = None,
) -> CurvatureTensor:
    """Build a tensor from one value per symmetry orbit (0-based indices)."""
    components: dict[Index4, complex] = {}
    for index, value in entries:
        key, conj = canonical(index)
        v = complex(value)
        if v != 0:
            components[key] = v.conjugate() if conj else v
    return CurvatureTensor(n=n, components=components, frame_labels=frame_labels)


def symmetrize(arr: np.ndarray) -> np.ndarray:
    """Project a 4-index array onto the Kahler symmetries."""
    s = (
        arr
        + arr.transpose(2, 1, 0, 3)
        + arr.transpose(0, 3, 2, 1)
        + arr.transpose(2, 3, 0, 1)
    ) / 4
    return (s + np.conj(s.transpose(1, 0, 3, 2))) / 2


def tensor_from_array(
    arr: np.ndarray, frame_labels: tuple[str, ...] | None = None
) -> CurvatureTensor:
    """Build a tensor from a dense array, symmetrizing it first."""
    s = symmetrize(np.asarray(arr, dtype=complex))
    entries = []
    for idx in np.argwhere(s != 0):
        index = tuple(int(i) for i in idx)
        if canonical(index)[0] == index:
            entries.append((index, s[index]))
    return tensor_from_entries(s.shape[0], entries, frame_labels)


def symmetry_residual(R: CurvatureTensor) -> float:
    """Largest violation of the Kahler and Hermitian symmetries."""
    arr = R.to_array()
    return float(max(
        np.max(np.abs(arr - arr.transpose(2, 1, 0, 3)), initial=0.0),
        np.max(np.abs(arr - arr.transpose(0, 3, 2, 1)), initial=0.0),
        np.max(np.abs(arr - np.conj(arr.transpose(1, 0, 3, 2))), initial=0.0),
    ))


def _chevalley_components(
    space: CSpace, metric: InvariantMetric
) -> dict[Index4, Fraction]:
    """<R(E_a, E_-b) E_c, E_-d> from the Levi-Civita connection of G/K.

    The Nomizu map Lambda(X)Y = [X, Y]_m / 2 + U(X, Y) of the invariant metric
    is root graded: Lambda(E_rho) E_sigma is a rational multiple of
    E_(rho+sigma). The curvature is
    R(X, Y) = [Lambda(X), Lambda(Y)] - Lambda([X, Y]_m) - ad([X, Y]_k).
    """
    alg = space.algebra
    data = space.chevalley
    frame = space.delta_phi
    position = {root.weight: i for i, root in enumerate(frame)}
    tangent = set(position) | {tuple(-w for w in root.weight) for root in frame}

    def pairing(root: Root) -> Fraction:
        # <E_rho, E_-rho> = -g z
        base = root if root.is_positive else alg.negative(root)
        return -metric.g[base] * data.z[root]

    cache: dict[tuple[Root, Root], tuple[Root | None, Fraction]] = {}

    def nomizu(rho: Root, sigma: Root) -> tuple[Root | None, Fraction]:
        key = (rho, sigma)
        if key not in cache:
            tau = alg.add(rho, sigma)
            if tau is None or tau.weight not in tangent:
                cache[key] = (None, Fraction(0))
            else:
                neg_tau = alg.negative(tau)
                u = (
                    data.n(neg_tau, rho) * pairing(sigma)
                    + data.n(neg_tau, sigma) * pairing(rho)
                ) / (2 * pairing(tau))
                cache[key] = (tau, Fraction(data.n(rho, sigma), 2) + u)
        return cache[key]

    def twice(first: Root, second: Root, gamma: Root) -> Fraction:
        # coefficient of Lambda(E_first) Lambda(E_second) E_gamma
        mid, inner = nomizu(second, gamma)
        if mid is None:
            return Fraction(0)
        return inner * nomizu(first, mid)[1]

    out: dict[Index4, Fraction] = {}
    for ia, alpha in enumerate(frame):
        for ib, beta in enumerate(frame):
            neg_beta = alg.negative(beta)
            diff = alg.add(alpha, neg_beta)
            for ic, gamma in enumerate(frame):
                weights = zip(alpha.weight, beta.weight, gamma.weight, strict=True)
                weight = tuple(a - b + c for a, b, c in weights)
                id_ = position.get(weight)
                if id_ is None or canonical((ia, ib, ic, id_))[0] != (ia, ib, ic, id_):
                    continue
                coeff = twice(alpha, neg_beta, gamma) - twice(neg_beta, alpha, gamma)
                if ia == ib:
                    coeff -= data.z[alpha] * data.h_gram[(alpha, gamma)]
                elif diff is not None and diff.weight in tangent:
                    coeff -= data.n(alpha, neg_beta) * nomizu(diff, gamma)[1]
                elif diff is not None:
                    coeff -= data.n(alpha, neg_beta) * data.n(diff, gamma)
                if coeff != 0:
                    out[(ia, ib, ic, id_)] = coeff * pairing(frame[id_])
    return out


def assemble_general(space: CSpace, metric: InvariantMetric) -> CurvatureTensor:
    """Assemble from the homogeneous Levi-Civita connection; valid for every family."""
    norms = [metric.g[x] * space.chevalley.z[x] for x in space.delta_phi]
    entries = []
    for (a, b, c, d), value in _chevalley_components(space, metric).items():
        scale = math.sqrt(float(norms[a] * norms[b] * norms[c] * norms[d]))
        entries.append(((a, b, c, d), float(value) / scale))
    return tensor_from_entries(space.n, entries, space.frame_labels())


def assemble_type_a(space: CSpace, metric: InvariantMetric) -> CurvatureTensor:
    """Assemble a type-A tensor directly in the unitary frame."""
    index = {x.pair: i for i, x in enumerate(space.delta_phi) if x.pair is not None}
    gv = {pair: float(metric.g[space.delta_phi[i]]) for pair, i in index.items()}
    size = space.algebra.rank + 1
    entries: list[tuple[Index4, complex]] = [
        ((i, i, i, i), 2 / gv[pair]) for pair, i in index.items()
    ]

    def add(value: float, *pairs: tuple[int, int]) -> None:
        if all(p in index for p in pairs):
            a, b, c, d = (index[p] for p in pairs)
            entries.append(((a, b, c, d), value))

    for i, j, k in combinations(range(1, size + 1), 3):
        if (i, k) not in gv:
            continue
        inv = 1 / gv[(i, k)]
        add(-inv, (j, k), (j, k), (i, j), (i, j))
        add(inv, (i, j), (i, j), (i, k), (i, k))
        add(inv, (j, k), (j, k), (i, k), (i, k))

    for i, p, q, k in combinations(range(1, size + 1), 4):
        if (i, k) not in gv:
            continue
        if all(x in gv for x in [(q, k), (p, k), (i, q), (i, p)]):
            first = -math.sqrt(gv[(i, p)] * gv[(q, k)]) / (
                gv[(i, k)] * math.sqrt(gv[(i, q)] * gv[(p, k)])
            )
            add(first, (q, k), (p, k), (i, q), (i, p))
        if all(x in gv for x in [(p, q), (p, k), (i, q)]):
            second = math.sqrt(gv[(p, q)]) / math.sqrt(
                gv[(i, k)] * gv[(i, q)] * gv[(p, k)]
            )
            add(second, (p, q), (p, k), (i, k), (i, q))
    return tensor_from_entries(space.n, entries, space.frame_labels())


def assemble(
    space: CSpace, metric: InvariantMetric, fast: bool | None = None
) -> Result[CurvatureTensor, str]:
    """Curvature tensor of (g, Phi) with an invariant metric, in the unitary frame.

    Args:
        space: The C-space
        metric: An invariant metric on that space
        fast: Use the closed type-A formulas; defaults to True exactly for type A

    Returns:
        Result containing the CurvatureTensor or an error message
    """
    if metric.space is not space:
        return Failure(f"Metric does not belong to {space.name}")
    use_fast = space.algebra.family is Family.A if fast is None else fast
    if use_fast and space.algebra.family is not Family.A:
        return Failure("The closed curvature formulas only apply to type A")
    try:
        build = assemble_type_a if use_fast else assemble_general
        R = build(space, metric)
        logger.debug(
            "Assembled %s: n=%d, %d orbits", space.name, R.n, len(R.components)
        )
        return Success(R)
    except Exception as e:
        return Failure(f"Error assembling curvature of {space.name}: {e!s}")


def ricci(R: CurvatureTensor) -> HermitianTensor2:
    """Ric_{a conj b} = sum_c R_{a conj b c conj c}."""
    return HermitianTensor2(n=R.n, entries=np.einsum("abcc->ab", R.to_array()))


def scalar(R: CurvatureTensor) -> float:
    return float(np.real(np.trace(ricci(R).entries)))


def evaluate(R: CurvatureTensor, x: np.ndarray, y: np.ndarray) -> float:
    """R(X, conj X, Y, conj Y)."""
    value = np.einsum("abcd,a,b,c,d->", R.to_array(), x, np.conj(x), y, np.conj(y))
    return float(np.real(value))


def ricci_value(ric: HermitianTensor2, x: np.ndarray) -> float:
    return float(np.real(np.einsum("ab,a,b->", ric.entries, x, np.conj(x))))


def _unit(R: CurvatureTensor, x: np.ndarray) -> Result[np.ndarray, str]:
    v = np.asarray(x, dtype=complex)
    if v.shape != (R.n,):
        return Failure(f"Vector of shape {v.shape} for a frame of dimension {R.n}")
    norm = np.linalg.norm(v)
    if norm == 0:
        return Failure("Direction must be a nonzero vector")
    return Success(v / norm)


def holomorphic_sectional(R: CurvatureTensor, x: np.ndarray) -> Result[float, str]:
    """H(X) = R(X, conj X, X, conj X) / |X|^4."""
    return _unit(R, x).map(lambda u: evaluate(R, u, u))


def ric_perp(R: CurvatureTensor, x: np.ndarray) -> Result[float, str]:
    """Orthogonal Ricci Ric(X, conj X) - H(X) for |X| = 1."""
    return _unit(R, x).map(lambda u: ricci_value(ricci(R), u) - evaluate(R, u, u))


def ric_plus(R: CurvatureTensor, x: np.ndarray) -> Result[float, str]:
    return _unit(R, x).map(lambda u: ricci_value(ricci(R), u) + evaluate(R, u, u))


def frame_diagonal_report(R: CurvatureTensor) -> list[FrameDiagonalRow]:
    """Ricci, H, orthogonal Ricci and Ric+ on each frame vector."""
    arr = R.to_array()
    ric = np.real(np.diag(ricci(R).entries))
    rows = []
    for a in range(R.n):
        h = float(np.real(arr[a, a, a, a]))
        rows.append(FrameDiagonalRow(
            index=a,
            label=R.frame_labels[a] if R.frame_labels else None,
            ricci=float(ric[a]),
            holomorphic_sectional=h,
            ric_perp=float(ric[a]) - h,
            ric_plus=float(ric[a]) + h,
            perp_gap=(R.n - 1) * float(ric[a]) - (float(ric[a]) - h),
            plus_gap=(R.n + 1) * float(ric[a]) - (float(ric[a]) + h),
        ))
    return rows


def tensor_norm(R: CurvatureTensor) -> float:
    """Frobenius norm of the 4-index array."""
    return float(np.linalg.norm(R.to_array()))


def scaled(R: CurvatureTensor, s: float) -> CurvatureTensor:
    return CurvatureTensor(
        n=R.n,
        components={k: s * v for k, v in R.components.items()},
        frame_labels=R.frame_labels,
    )


def add(R: CurvatureTensor, S: CurvatureTensor) -> CurvatureTensor:
    if R.n != S.n:
        raise ValueError(f"Cannot add tensors of dimensions {R.n} and {S.n}")
    components = dict(R.components)
    for key, value in S.components.items():
        components[key] = components.get(key, 0.0) + value
    return CurvatureTensor(
        n=R.n,
        components={k: v for k, v in components.items() if v != 0},
        frame_labels=R.frame_labels,
    )


def product(R1: CurvatureTensor, R2: CurvatureTensor) -> CurvatureTensor:
    """Curvature of a product in a frame adapted to the factors."""
    shift = R1.n
    components = dict(R1.components)
    for (a, b, c, d), value in R2.components.items():
        components[(a + shift, b + shift, c + shift, d + shift)] = value
    labels = None
    if R1.frame_labels and R2.frame_labels:
        labels = tuple(f"1:{x}" for x in R1.frame_labels) + tuple(
            f"2:{x}" for x in R2.frame_labels
        )
    return CurvatureTensor(n=R1.n + R2.n, components=components, frame_labels=labels)


def mostow_siu_model(params: MostowSiuParams) -> CurvatureTensor:
    """Model curvature with -R_1111 = b, -R_11ii = c, -R_iiii = 2e, -R_iijj = e."""
    entries: list[tuple[Index4, complex]] = [((0, 0, 0, 0), -params.b)]
    for i in range(1, params.n):
        entries.append(((0, 0, i, i), -params.c))
        entries.append(((i, i, i, i), -2 * params.e))
        for j in range(i + 1, params.n):
            entries.append(((i, i, j, j), -params.e))
    return tensor_from_entries(params.n, entries)


def symmetric_scale(a: int, c: int) -> float:
    """Coordinate of e_a . e_c on the orthonormal basis of the symmetric square."""
    return 1.0 if a == c else 1 / math.sqrt(2)


def symmetric_pairs(n: int) -> list[tuple[int, int]]:
    return [(a, c) for a in range(n) for c in range(a, n)]


def random_kahler_operator(n: int, seed: int) -> CurvatureTensor:
    """Tensor of a random Hermitian operator on the symmetric square.

    R(a, conj b, c, conj d) = <Q(e_a . e_c), e_b . e_d>, so every symmetry holds.
    """
    pairs = symmetric_pairs(n)
    size = len(pairs)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    q = (g + g.conj().T) / 2
    pos = {p: i for i, p in enumerate(pairs)}
    entries = []
    for a, c in pairs:
        for b, d in pairs:
            index = (a, b, c, d)
            if canonical(index)[0] == index:
                value = q[pos[(b, d)], pos[(a, c)]]
                scale = symmetric_scale(a, c) * symmetric_scale(b, d)
                entries.append((index, scale * value))
    return tensor_from_entries(n, entries)


def constant_holomorphic_curvature(n: int, k: float) -> CurvatureTensor:
    """Fubini-Study model R = (k/2)(delta_ab delta_cd + delta_ad delta_cb)."""
    entries: list[tuple[Index4, complex]] = []
    for a in range(n):
        entries.append(((a, a, a, a), k))
        for c in range(a + 1, n):
            entries.append(((a, a, c, c), k / 2))
    return tensor_from_entries(n, entries)


def dump_tensor(R: CurvatureTensor) -> dict[str, Any]:
    """Report form: canonical orbits only, 1-based, sorted."""
    rows = [
        [a + 1, b + 1, c + 1, d + 1, float(np.real(v)), float(np.imag(v))]
        for (a, b, c, d), v in sorted(R.components.items())
    ]
    labels = list(R.frame_labels) if R.frame_labels else None
    return {"n": R.n, "frame_labels": labels, "components": rows}


def load_tensor(data: dict[str, Any]) -> Result[CurvatureTensor, str]:
    try:
        n = int(data["n"])
        entries = [
            ((int(a) - 1, int(b) - 1, int(c) - 1, int(d) - 1), complex(re, im))
            for a, b, c, d, re, im in data["components"]
        ]
        if any(not 0 <= i < n for index, _ in entries for i in index):
            return Failure(f"Component index out of range for n={n}")
        labels = data.get("frame_labels")
        frame = tuple(labels) if labels else None
        return Success(tensor_from_entries(n, entries, frame))
    except (KeyError, TypeError, ValueError) as e:
        return Failure(f"Error reading tensor dump: {e!s}")
