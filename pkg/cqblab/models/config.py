from enum import Enum

from pydantic import BaseModel, Field

from cqblab.models.positivity import Mode


class AnalysisSettings(BaseModel):
    """Numerical settings shared by the positivity and flow operations."""
    tolerance: float = Field(default=1e-8, gt=0)
    starts: int = Field(default=64, ge=1)
    max_alternations: int = Field(default=500, ge=1)
    relative_change: float = Field(default=1e-12, gt=0)
    degeneracy: float = Field(default=1e-12, ge=0)
    seed: int = 0
    workers: int = Field(default=1, ge=1)


class Command(str, Enum):
    SPACE = "space"
    CURVATURE = "curvature"
    CHECK = "check"
    FLOW = "flow"
    SUITE = "suite"


class What(str, Enum):
    """Which quantity a check command evaluates."""
    CQB = "cqb"
    DCQB = "dcqb"
    Q = "q"
    RANK1 = "rank1"
    RANKK = "rankk"


class Sign(str, Enum):
    POS = "pos"
    NONNEG = "nonneg"
    NEG = "neg"
    NONPOS = "nonpos"


class JobConfig(BaseModel):
    """One CLI job; loaded from a JSON file and overridden by flags."""
    command: Command
    family: str = "A"
    rank: int = Field(default=2, ge=1)
    phi: str = "1"
    metric: str = "ke"
    what: What = What.CQB
    mode: Mode = Mode.CQB
    rank_limit: int | None = None
    sign: Sign = Sign.POS
    seed: int = 0
    tolerance: float = Field(default=1e-8, gt=0)
    json_path: str | None = None
    csv_path: str | None = None
    tensor_path: str | None = None
    # flow
    n: int = Field(default=1, ge=1)
    k0: float = 1.0
    t_max: float = Field(default=0.5, gt=0)
    dt: float | None = Field(default=None, gt=0)
    monitor_every: int = Field(default=0, ge=0)
    experiment: int = Field(default=0, ge=0)

    def settings(self) -> AnalysisSettings:
        return AnalysisSettings(tolerance=self.tolerance, seed=self.seed)
