from dataclasses import dataclass, field
from fractions import Fraction

from cqblab.models.lie import ChevalleyData, LieAlgebra, Root


@dataclass(frozen=True, eq=False)
class CSpace:
    """A simple Kahler C-space (g, Phi).

    Attributes:
        algebra: The simple Lie algebra g
        chevalley: Its Chevalley data
        phi: 1-based indices of the fundamental roots in Phi, ascending
        delta_phi: Positive roots with a positive coefficient on some root of
            Phi, in ascending root order; this indexes the tangent frame
    """
    algebra: LieAlgebra = field(repr=False)
    chevalley: ChevalleyData = field(repr=False)
    phi: tuple[int, ...]
    delta_phi: tuple[Root, ...]

    @property
    def n(self) -> int:
        return len(self.delta_phi)

    @property
    def b2(self) -> int:
        return len(self.phi)

    @property
    def name(self) -> str:
        return f"({self.algebra.name}, {{{','.join(str(i) for i in self.phi)}}})"

    def frame_labels(self) -> tuple[str, ...]:
        return tuple(root.label() for root in self.delta_phi)

    def index(self, root: Root) -> int:
        return self.delta_phi.index(root)


@dataclass(frozen=True, eq=False)
class InvariantMetric:
    """An invariant Kahler metric g_(c_1, ..., c_m).

    Attributes:
        space: The C-space the metric lives on
        c: Values on the roots of Phi, all positive
        g: The induced value g_beta on every root of the frame
    """
    space: CSpace = field(repr=False)
    c: tuple[Fraction, ...]
    g: dict[Root, Fraction] = field(repr=False)

    def values(self) -> list[Fraction]:
        """g in frame order."""
        return [self.g[root] for root in self.space.delta_phi]
