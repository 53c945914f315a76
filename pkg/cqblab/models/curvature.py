from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field

Index4 = tuple[int, int, int, int]

# Tensors up to this frame dimension keep a cached dense array.
DENSE_LIMIT = 16


def orbit(index: Index4) -> list[tuple[Index4, bool]]:
    """Images of (a, b, c, d) under the Kahler symmetries.

    Each image is paired with True when it carries the conjugated value.
    """
    a, b, c, d = index
    plain = [(a, b, c, d), (c, b, a, d), (a, d, c, b), (c, d, a, b)]
    return [(x, False) for x in plain] + [((y, x, w, z), True) for x, y, z, w in plain]


def canonical(index: Index4) -> tuple[Index4, bool]:
    """Smallest image of an index tuple, and whether reading it needs conj."""
    return min(orbit(index), key=lambda item: item[0])


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """Components R(e_a, conj e_b, e_c, conj e_d) in a unitary frame.

    Only one representative per symmetry orbit is stored (the smallest index
    tuple, 0-based); every other component is produced on read.
    """
    n: int
    components: dict[Index4, complex] = field(repr=False)
    frame_labels: tuple[str, ...] | None = None
    _cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def component(self, a: int, b: int, c: int, d: int) -> complex:
        key, conj = canonical((a, b, c, d))
        value = complex(self.components.get(key, 0.0))
        return value.conjugate() if conj else value

    def to_array(self) -> np.ndarray:
        """Dense n x n x n x n array, cached for small frames."""
        cached = self._cache.get("dense")
        if cached is not None:
            return cached
        arr = np.zeros((self.n,) * 4, dtype=complex)
        for key, value in self.components.items():
            for image, conj in orbit(key):
                arr[image] = np.conj(value) if conj else value
        arr.setflags(write=False)
        if self.n <= DENSE_LIMIT:
            self._cache["dense"] = arr
        return arr


@dataclass(frozen=True, eq=False)
class HermitianTensor2:
    """A Hermitian n x n tensor such as Ric_{a conj b}."""
    n: int
    entries: np.ndarray

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries))


class MostowSiuParams(BaseModel):
    """Parameters of the negatively curved model curvature."""
    n: int = Field(ge=2)
    b: float = Field(gt=0)
    c: float = Field(gt=0)
    e: float = Field(gt=0)

    @property
    def negative_regime(self) -> bool:
        return self.n * self.b * self.e > (self.n - 1) ** 2 * self.c**2


class FrameDiagonalRow(BaseModel):
    """Directional curvature quantities on one frame vector."""
    index: int
    label: str | None = None
    ricci: float
    holomorphic_sectional: float
    ric_perp: float
    ric_plus: float
    perp_gap: float = Field(description="(n-1) Ric - Ric_perp")
    plus_gap: float = Field(description="(n+1) Ric - Ric_plus")
