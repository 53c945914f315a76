"""Matrix-realized classical Lie algebras and their Chevalley data.

The invariant form is the trace form B(X, Y) = tr(XY) of the defining
representation for every family. For B, C and D it is a positive multiple of
the Killing form, so using it only rescales metrics. Root vectors are
elementary-matrix combinations with E_alpha^dagger = E_{-alpha}; under the
compact conjugation X -> -X^dagger this reads conj(E_alpha) = -E_{-alpha}.
All constants are computed by explicit brackets and traces in exact
arithmetic; z_alpha is whatever B(E_alpha, E_{-alpha}) the realization gives.
"""
import logging
from fractions import Fraction

import numpy as np
from returns.maybe import Maybe
from returns.result import Failure, Result, Success

from cqblab.core.exact import solve_linear_system
from cqblab.models.lie import (
    MIN_RANK,
    ChevalleyData,
    Family,
    LieAlgebra,
    RationalMatrix,
    Root,
    root_order_key,
)

logger = logging.getLogger(__name__)

# (weight, matrix, type-A index pair)
_RootSpec = tuple[tuple[int, ...], RationalMatrix, tuple[int, int] | None]


def zeros(dim: int) -> RationalMatrix:
    return np.full((dim, dim), Fraction(0), dtype=object)


def unit(dim: int, i: int, j: int, value: int = 1) -> RationalMatrix:
    """Elementary matrix with `value` at (i, j), 0-based."""
    m = zeros(dim)
    m[i, j] = Fraction(value)
    return m


def bracket(x: RationalMatrix, y: RationalMatrix) -> RationalMatrix:
    return x.dot(y) - y.dot(x)


def trace_form(x: RationalMatrix, y: RationalMatrix) -> Fraction:
    return Fraction(sum(x.dot(y).diagonal(), Fraction(0)))


def is_zero(x: RationalMatrix) -> bool:
    return bool(np.all(x == 0))


def ratio(x: RationalMatrix, y: RationalMatrix) -> Fraction | None:
    """The q with x == q*y, or None when x is not a multiple of y."""
    nonzero = np.argwhere(y != 0)
    if len(nonzero) == 0:
        return None
    i, j = nonzero[0]
    q = Fraction(x[i, j]) / Fraction(y[i, j])
    return q if is_zero(x - q * y) else None


def _epsilon(length: int, *terms: tuple[int, int]) -> tuple[int, ...]:
    w = [0] * length
    for index, sign in terms:
        w[index] += sign
    return tuple(w)


def _roots_a(r: int) -> list[_RootSpec]:
    dim = r + 1
    specs: list[_RootSpec] = []
    for i in range(dim):
        for j in range(dim):
            if i != j:
                weight = _epsilon(dim, (i, 1), (j, -1))
                pair = (i + 1, j + 1) if i < j else None
                specs.append((weight, unit(dim, i, j), pair))
    return specs


def _roots_bcd(family: Family, r: int) -> list[_RootSpec]:
    # B has an extra index 0; p_i and q_i are the paired coordinates.
    offset = 1 if family is Family.B else 0
    dim = 2 * r + offset
    p = [offset + i for i in range(r)]
    q = [offset + r + i for i in range(r)]
    symplectic = family is Family.C
    specs: list[_RootSpec] = []

    for i in range(r):
        for j in range(r):
            if i != j:
                e = unit(dim, p[i], p[j]) - unit(dim, q[j], q[i])
                specs.append((_epsilon(r, (i, 1), (j, -1)), e, None))
    for i in range(r):
        for j in range(i + 1, r):
            if symplectic:
                up = unit(dim, p[i], q[j]) + unit(dim, p[j], q[i])
            else:
                up = unit(dim, p[i], q[j]) - unit(dim, p[j], q[i])
            specs.append((_epsilon(r, (i, 1), (j, 1)), up, None))
            specs.append((_epsilon(r, (i, -1), (j, -1)), up.T.copy(), None))
    for i in range(r):
        match family:
            case Family.B:
                e = unit(dim, p[i], 0) - unit(dim, 0, q[i])
                specs.append((_epsilon(r, (i, 1)), e, None))
                specs.append((_epsilon(r, (i, -1)), e.T.copy(), None))
            case Family.C:
                e = unit(dim, p[i], q[i])
                specs.append((_epsilon(r, (i, 2)), e, None))
                specs.append((_epsilon(r, (i, -2)), e.T.copy(), None))
            case _:
                pass
    return specs


def _simple_weights(family: Family, r: int) -> list[tuple[int, ...]]:
    length = r + 1 if family is Family.A else r
    simple = [_epsilon(length, (i, 1), (i + 1, -1)) for i in range(r - 1)]
    match family:
        case Family.A:
            simple.append(_epsilon(length, (r - 1, 1), (r, -1)))
        case Family.B:
            simple.append(_epsilon(length, (r - 1, 1)))
        case Family.C:
            simple.append(_epsilon(length, (r - 1, 2)))
        case Family.D:
            simple.append(_epsilon(length, (r - 2, 1), (r - 1, 1)))
    return simple


def _cartan_basis(family: Family, r: int, dim: int) -> tuple[RationalMatrix, ...]:
    if family is Family.A:
        return tuple(unit(dim, i, i) - unit(dim, i + 1, i + 1) for i in range(r))
    offset = 1 if family is Family.B else 0
    return tuple(
        unit(dim, offset + i, offset + i) - unit(dim, offset + r + i, offset + r + i)
        for i in range(r)
    )


def root_coefficients(
    weight: tuple[int, ...], simple: list[tuple[int, ...]]
) -> Result[tuple[int, ...], str]:
    """Express a weight over the fundamental roots, exactly.

    Args:
        weight: Epsilon coordinates of the root
        simple: Epsilon coordinates of the fundamental roots

    Returns:
        Result containing integer coefficients of one sign, or an error message
    """
    rows = [[s[k] for s in simple] for k in range(len(weight))]
    solved = solve_linear_system(rows, list(weight), prefix="n")
    if isinstance(solved, Failure):
        return Failure(
            f"Weight {weight} is not in the root lattice: {solved.failure()}"
        )
    coeffs = solved.unwrap()
    if any(c.denominator != 1 for c in coeffs):
        return Failure(f"Non-integral root coordinates {coeffs} for {weight}")
    ints = tuple(int(c) for c in coeffs)
    if not (all(c >= 0 for c in ints) or all(c <= 0 for c in ints)):
        return Failure(f"Root {weight} has mixed-sign coordinates {ints}")
    return Success(ints)


def build_algebra(family: Family | str, rank: int) -> Result[LieAlgebra, str]:
    """Build a classical simple Lie algebra with roots and root vectors.

    Args:
        family: One of A, B, C, D
        rank: The rank r, at least 1, 2, 3, 4 for A, B, C, D respectively

    Returns:
        Result containing the LieAlgebra or an error message
    """
    try:
        fam = Family(family)
    except ValueError:
        return Failure(f"Unknown Lie family {family!r}; expected one of A, B, C, D")
    if rank < MIN_RANK[fam]:
        return Failure(
            f"Rank {rank} is below the admissible bound r >= {MIN_RANK[fam]} "
            f"for type {fam.value}"
        )
    try:
        specs = _roots_a(rank) if fam is Family.A else _roots_bcd(fam, rank)
        dim = specs[0][1].shape[0]
        simple_weights = _simple_weights(fam, rank)

        roots: list[Root] = []
        vectors: dict[Root, RationalMatrix] = {}
        for weight, matrix, pair in specs:
            coeffs = root_coefficients(weight, simple_weights)
            if isinstance(coeffs, Failure):
                return coeffs
            root = Root(coeffs=coeffs.unwrap(), weight=weight, pair=pair)
            roots.append(root)
            vectors[root] = matrix

        positive = sorted((x for x in roots if x.is_positive), key=root_order_key)
        negative = [x for x in roots if not x.is_positive]
        by_weight = {x.weight: x for x in roots}
        simple = tuple(by_weight[w] for w in simple_weights)
        logger.debug("Built %s%d with %d roots", fam.value, rank, len(roots))
        return Success(LieAlgebra(
            family=fam,
            rank=rank,
            matrix_dim=dim,
            cartan_basis=_cartan_basis(fam, rank, dim),
            simple_roots=simple,
            roots=tuple(positive + negative),
            root_vectors=vectors,
            by_weight=by_weight,
        ))
    except Exception as e:
        return Failure(f"Error building algebra {family}{rank}: {e!s}")


def positive_roots(alg: LieAlgebra) -> list[Root]:
    """Positive roots in ascending order of the coefficient order relation."""
    return sorted((x for x in alg.roots if x.is_positive), key=root_order_key)


def root_value(alg: LieAlgebra, root: Root, h: RationalMatrix) -> Fraction | None:
    """alpha(H) read off from [H, E_alpha] = alpha(H) E_alpha."""
    e = alg.root_vectors[root]
    return ratio(bracket(h, e), e)


def _dual_elements(
    alg: LieAlgebra,
) -> Result[tuple[dict[Root, Fraction], dict[Root, RationalMatrix]], str]:
    z: dict[Root, Fraction] = {}
    h: dict[Root, RationalMatrix] = {}
    for root in alg.roots:
        e = alg.root_vectors[root]
        e_neg = alg.root_vectors[alg.negative(root)]
        if not is_zero(e.T - e_neg):
            return Failure(f"Reality convention fails for {root.label()}")
        z_alpha = trace_form(e, e_neg)
        if z_alpha == 0:
            return Failure(f"Degenerate pairing B(E, E_-) = 0 at {root.label()}")
        h_alpha = bracket(e, e_neg) / z_alpha
        for basis_h in alg.cartan_basis:
            value = root_value(alg, root, basis_h)
            if value is None or trace_form(h_alpha, basis_h) != value:
                return Failure(
                    f"[E, E_-]/z is not the B-dual of {root.label()}: "
                    f"alpha(H)={value}, B(H_alpha, H)={trace_form(h_alpha, basis_h)}"
                )
        z[root] = z_alpha
        h[root] = h_alpha
    return Success((z, h))


def _structure_constants(alg: LieAlgebra) -> Result[dict[tuple[Root, Root], int], str]:
    table: dict[tuple[Root, Root], int] = {}
    for alpha in alg.roots:
        for beta in alg.roots:
            if beta.weight == tuple(-w for w in alpha.weight):
                continue
            br = bracket(alg.root_vectors[alpha], alg.root_vectors[beta])
            gamma = alg.add(alpha, beta)
            if gamma is None:
                if not is_zero(br):
                    return Failure(
                        f"[E_{alpha.label()}, E_{beta.label()}] is nonzero but "
                        "the sum is not a root"
                    )
                continue
            q = ratio(br, alg.root_vectors[gamma])
            if q is None or q == 0 or q.denominator != 1:
                return Failure(
                    f"[E_{alpha.label()}, E_{beta.label()}] is not a nonzero integer "
                    f"multiple of E_{gamma.label()} (ratio {q})"
                )
            table[(alpha, beta)] = int(q)
    for (alpha, beta), value in table.items():
        opposite = (alg.negative(alpha), alg.negative(beta))
        if table.get(opposite) != -value:
            return Failure(
                f"N_(-a,-b) != -N_(a,b) for a={alpha.label()}, b={beta.label()}"
            )
        if table.get((beta, alpha)) != -value:
            return Failure(f"N is not antisymmetric at {alpha.label()}, {beta.label()}")
    return Success(table)


def chevalley(alg: LieAlgebra) -> Result[ChevalleyData, str]:
    """Compute the Chevalley data of an algebra by explicit brackets.

    Args:
        alg: The Lie algebra

    Returns:
        Result containing ChevalleyData, or diagnostics naming the first
        bracket that is not proportional to the expected element
    """
    try:
        duals = _dual_elements(alg)
        if isinstance(duals, Failure):
            return duals
        z, h = duals.unwrap()
        table = _structure_constants(alg)
        if isinstance(table, Failure):
            return table
        gram = {
            (alpha, gamma): trace_form(h[alpha], h[gamma])
            for alpha in alg.roots
            for gamma in alg.roots
        }
        n_table = table.unwrap()
        logger.debug("Chevalley data for %s: %d nonzero N", alg.name, len(n_table))
        return Success(ChevalleyData(n_table=n_table, z=z, h_gram=gram, h=h))
    except Exception as e:
        return Failure(f"Error computing Chevalley data for {alg.name}: {e!s}")


def root_by_weight(alg: LieAlgebra, weight: tuple[int, ...]) -> Maybe[Root]:
    """Look up a root by its epsilon coordinates."""
    return Maybe.from_optional(alg.by_weight.get(tuple(weight)))


def verify_chevalley(
    alg: LieAlgebra, data: ChevalleyData
) -> Result[ChevalleyData, str]:
    """Re-check every bracket relation against a ChevalleyData table.

    Returns:
        Result containing the same data, or a Failure naming the first violation
    """
    try:
        for alpha in alg.roots:
            e_alpha = alg.root_vectors[alpha]
            neg = alg.negative(alpha)
            if data.z[alpha] != data.z[neg]:
                return Failure(f"z is not symmetric under negation at {alpha.label()}")
            cartan = bracket(e_alpha, alg.root_vectors[neg])
            if not is_zero(cartan - data.z[alpha] * data.h[alpha]):
                return Failure(f"[E, E_-] != z H at {alpha.label()}")
            for beta in alg.roots:
                if beta == neg:
                    continue
                expected = zeros(alg.matrix_dim)
                gamma = alg.add(alpha, beta)
                if gamma is not None:
                    expected = data.n(alpha, beta) * alg.root_vectors[gamma]
                if not is_zero(bracket(e_alpha, alg.root_vectors[beta]) - expected):
                    return Failure(
                        f"Bracket of E_{alpha.label()} and E_{beta.label()} "
                        "disagrees with the structure constant table"
                    )
                if data.h_gram[(alpha, beta)] != data.h_gram[(beta, alpha)]:
                    return Failure("B(H_a, H_b) table is not symmetric")
        return Success(data)
    except Exception as e:
        return Failure(f"Error verifying Chevalley data for {alg.name}: {e!s}")
