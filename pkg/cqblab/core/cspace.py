import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from returns.maybe import Maybe, Nothing, Some
from returns.result import Failure, Result, Success

from cqblab.core.exact import solve_linear_system
from cqblab.core.lie import chevalley, positive_roots
from cqblab.models.cspace import CSpace, InvariantMetric
from cqblab.models.lie import LieAlgebra, Root

logger = logging.getLogger(__name__)


def in_delta_phi(root: Root, phi: Sequence[int]) -> bool:
    return any(root.coeffs[i - 1] > 0 for i in phi)


def build_cspace(alg: LieAlgebra, phi: Sequence[int]) -> Result[CSpace, str]:
    """Build the C-space (g, Phi) with its ordered tangent frame.

    Args:
        alg: The simple Lie algebra
        phi: 1-based indices of fundamental roots, nonempty

    Returns:
        Result containing the CSpace or an error message
    """
    indices = tuple(sorted(set(phi)))
    if not indices:
        return Failure("Phi must be a nonempty set of fundamental roots")
    if indices[0] < 1 or indices[-1] > alg.rank:
        return Failure(f"Phi {list(indices)} is not a subset of 1..{alg.rank}")
    data = chevalley(alg)
    if isinstance(data, Failure):
        return data
    delta = tuple(x for x in positive_roots(alg) if in_delta_phi(x, indices))
    logger.debug("C-space %s{%s}: n=%d", alg.name, indices, len(delta))
    return Success(CSpace(
        algebra=alg, chevalley=data.unwrap(), phi=indices, delta_phi=delta
    ))


def _additive(space: CSpace, c: Sequence[Fraction]) -> dict[Root, Fraction]:
    return {
        root: sum(
            (root.coeffs[i - 1] * cj for i, cj in zip(space.phi, c, strict=True)),
            Fraction(0),
        )
        for root in space.delta_phi
    }


def invariant_metric(
    space: CSpace, c: Sequence[Fraction | int | str]
) -> Result[InvariantMetric, str]:
    """The invariant metric g_(c_1, ..., c_m) on a C-space.

    Args:
        space: The C-space
        c: One positive rational per root of Phi

    Returns:
        Result containing the metric or an error message
    """
    try:
        values = tuple(Fraction(x) for x in c)
    except (ValueError, ZeroDivisionError) as e:
        return Failure(f"Error reading metric coefficients {list(c)}: {e!s}")
    if len(values) != space.b2:
        return Failure(
            f"Metric needs {space.b2} coefficients for {space.name}, got {len(values)}"
        )
    if any(x <= 0 for x in values):
        shown = [str(x) for x in values]
        return Failure(f"Metric coefficients must be positive, got {shown}")
    return Success(InvariantMetric(space=space, c=values, g=_additive(space, values)))


def implied_coefficients(
    space: CSpace, g: dict[Root, Fraction]
) -> Result[tuple[Fraction, ...], str]:
    """Recover c from per-root values g, or fail when g is not additive."""
    rows = [[root.coeffs[i - 1] for i in space.phi] for root in space.delta_phi]
    rhs = [g[root] for root in space.delta_phi]
    solved = solve_linear_system(rows, rhs, prefix="c")
    if isinstance(solved, Failure):
        return Failure(f"Values are not additive over Phi: {solved.failure()}")
    return Success(tuple(solved.unwrap()))


def kahler_einstein_coefficients(space: CSpace) -> Result[InvariantMetric, str]:
    """The Kahler-Einstein metric, g_alpha = sum over the frame of B(H_alpha, H_beta).

    The values are left unscaled.

    Args:
        space: The C-space

    Returns:
        Result containing the metric, or an error if the values fail additivity
    """
    gram = space.chevalley.h_gram
    g = {
        alpha: sum((gram[(alpha, beta)] for beta in space.delta_phi), Fraction(0))
        for alpha in space.delta_phi
    }
    coeffs = implied_coefficients(space, g)
    if isinstance(coeffs, Failure):
        return Failure(f"Kahler-Einstein values of {space.name} break additivity")
    c = coeffs.unwrap()
    if _additive(space, c) != g:
        return Failure(f"Kahler-Einstein values of {space.name} break additivity")
    if any(x <= 0 for x in c):
        return Failure(f"Kahler-Einstein coefficients {c} are not positive")
    logger.debug("KE coefficients for %s: %s", space.name, [str(x) for x in c])
    return Success(InvariantMetric(space=space, c=c, g=g))


def proportionality_factor(
    first: InvariantMetric, second: InvariantMetric
) -> Maybe[Fraction]:
    """The rational s with second.g == s * first.g on every root, if any."""
    if first.space is not second.space:
        return Nothing
    ratios = {second.g[x] / first.g[x] for x in first.space.delta_phi}
    if len(ratios) != 1:
        return Nothing
    return Some(ratios.pop())


def describe(space: CSpace) -> dict[str, Any]:
    """JSON-friendly descriptor of a C-space."""
    return {
        "family": space.algebra.family.value,
        "rank": space.algebra.rank,
        "phi": list(space.phi),
        "n": space.n,
        "b2": space.b2,
        "frame": list(space.frame_labels()),
    }


def describe_metric(metric: InvariantMetric) -> dict[str, Any]:
    return {
        "c": [str(x) for x in metric.c],
        "g": {root.label(): str(metric.g[root]) for root in metric.space.delta_phi},
    }
