from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

# Matrices in this module are numpy object arrays holding Fraction entries.
RationalMatrix = np.ndarray


class Family(str, Enum):
    """Classical families of simple Lie algebras."""
    A = "A"
    B = "B"
    C = "C"
    D = "D"


# Smallest admissible rank per family.
MIN_RANK: dict[Family, int] = {
    Family.A: 1,
    Family.B: 2,
    Family.C: 3,
    Family.D: 4,
}


@dataclass(frozen=True)
class Root:
    """A root of a classical Lie algebra.

    Attributes:
        coeffs: Coordinates over the fundamental roots, all >= 0 or all <= 0
        weight: Coordinates in the standard epsilon basis of the Cartan dual
        pair: For type A the index pair (i, k) with beta = alpha_ik (1-based)
    """
    coeffs: tuple[int, ...]
    weight: tuple[int, ...]
    pair: tuple[int, int] | None = None

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    def label(self) -> str:
        if self.pair is not None:
            i, k = self.pair
            return f"alpha_{i}{k}"
        return "alpha(" + ",".join(str(c) for c in self.coeffs) + ")"


def root_order_key(root: Root) -> tuple[int, ...]:
    """Order relation on roots: the first differing coefficient decides."""
    return root.coeffs


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A classical simple Lie algebra in its defining matrix realization."""
    family: Family
    rank: int
    matrix_dim: int
    cartan_basis: tuple[RationalMatrix, ...] = field(repr=False)
    simple_roots: tuple[Root, ...]
    roots: tuple[Root, ...]
    root_vectors: dict[Root, RationalMatrix] = field(repr=False)
    by_weight: dict[tuple[int, ...], Root] = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.family.value}{self.rank}"

    def negative(self, root: Root) -> Root:
        neg = self.by_weight.get(tuple(-w for w in root.weight))
        if neg is None:
            raise KeyError(f"No negative of {root.label()} in {self.name}")
        return neg

    def add(self, alpha: Root, beta: Root) -> Root | None:
        """The root alpha + beta, or None when the sum is not a root."""
        return self.by_weight.get(
            tuple(a + b for a, b in zip(alpha.weight, beta.weight, strict=True))
        )


@dataclass(frozen=True, eq=False)
class ChevalleyData:
    """Structure constants of a Chevalley basis, all computed by brackets.

    Attributes:
        n_table: N_{alpha,beta} for every ordered pair with alpha+beta a root
        z: z_alpha = B(E_alpha, E_{-alpha}) for every root
        h_gram: B(H_alpha, H_gamma) for every pair of roots
        h: H_alpha, the B-dual of alpha, for every root
    """
    n_table: dict[tuple[Root, Root], int]
    z: dict[Root, Fraction]
    h_gram: dict[tuple[Root, Root], Fraction]
    h: dict[Root, RationalMatrix] = field(repr=False)

    def n(self, alpha: Root, beta: Root) -> int:
        return self.n_table.get((alpha, beta), 0)
