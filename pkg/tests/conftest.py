import pytest

from cqblab.cli.main import SpaceTensor, space_tensor
from cqblab.core.curvature import mostow_siu_model, random_kahler_operator
from cqblab.models.config import AnalysisSettings
from cqblab.models.curvature import CurvatureTensor, MostowSiuParams


@pytest.fixture(scope="session")
def flag_a2() -> SpaceTensor:
    """SU(3)/T with g = (1, 1, 2)."""
    return space_tensor("A", 2, [1, 2], "c=1,1").unwrap()


@pytest.fixture(scope="session")
def p2() -> SpaceTensor:
    return space_tensor("A", 2, [1], "ke").unwrap()


@pytest.fixture(scope="session")
def mostow() -> CurvatureTensor:
    return mostow_siu_model(MostowSiuParams(n=2, b=2, c=1, e=2))


@pytest.fixture
def random_operator() -> CurvatureTensor:
    return random_kahler_operator(3, seed=7)


@pytest.fixture
def settings() -> AnalysisSettings:
    return AnalysisSettings(starts=16)
