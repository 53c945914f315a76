from dataclasses import dataclass, field

from pydantic import BaseModel, Field

from cqblab.models.curvature import CurvatureTensor


class FlowConstants(BaseModel):
    """Constants cutting out the time-dependent convex sets C(t)."""
    D1: float = Field(ge=0)  # noqa: N815
    E1: float = Field(ge=0)  # noqa: N815
    D2: float = Field(gt=0)  # noqa: N815
    E2: float = Field(ge=0)  # noqa: N815
    epsilon: float = Field(gt=0)


class Membership(BaseModel):
    """Which of the three conditions of C(t) hold, with signed margins.

    margin31 is the least Ricci eigenvalue, margin32 minus the estimated sup
    and margin33 the room left under the norm bound. A condition holds when
    its margin is at least -tolerance.
    """
    c31: bool
    c32: bool
    c33: bool
    margin31: float
    margin32: float
    margin33: float
    method: str = "alternating"

    @property
    def inside(self) -> bool:
        return self.c31 and self.c32 and self.c33


@dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    tensor: CurvatureTensor = field(repr=False)
    constants: FlowConstants
    membership: Membership | None = None
    # max |trace of dR/dt - dRic/dt| over the RK4 stages leading here
    trace_residual: float = 0.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled along a reaction-ODE run.

    notice is set when the run stopped before t_max.
    """
    states: list[FlowState]
    notice: str | None = None

    @property
    def truncated(self) -> bool:
        return self.notice is not None

    @property
    def final(self) -> FlowState:
        return self.states[-1]


class ExperimentRow(BaseModel):
    """One perturbed starting tensor of the membership experiment."""
    seed: int
    norm_r0: float
    initially_inside: bool
    inside_throughout: bool
    first_failure_t: float | None = None
    failed_conditions: list[str] = Field(default_factory=list)
    min_margin31: float
    min_margin32: float
    min_margin33: float
    t_end: float
    notice: str | None = None


class ExperimentReport(BaseModel):
    n: int
    count: int
    rows: list[ExperimentRow]

    @property
    def failures(self) -> list[ExperimentRow]:
        return [row for row in self.rows if not row.inside_throughout]
