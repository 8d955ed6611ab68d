"""Request and response bodies of the HTTP service.

States and relabelings travel as their canonical text form (see
:mod:`hs2.stateio`) inside JSON strings, so every payload is plain UTF-8
and byte-faithful to what the files hold.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from .examples import EXAMPLE_NAMES


class EvolveRequest(BaseModel):
    state: str = Field(description="state text, Eulerian or Lagrangian")
    t: float = Field(ge=0.0, description="evolution time")
    tol: Optional[float] = Field(default=None, gt=0.0)


class StateResponse(BaseModel):
    state: str
    kind: Literal["eulerian", "lagrangian"]


class TransformRequest(BaseModel):
    state: str
    direction: Literal["to-lagrangian", "to-eulerian"]
    tol: Optional[float] = Field(default=None, gt=0.0)


class BreakingRequest(BaseModel):
    state: str
    tol: Optional[float] = Field(default=None, gt=0.0)


class CellBreakingModel(BaseModel):
    lo: float
    hi: float
    times: list[float]


class BreakingResponse(BaseModel):
    first_time: Optional[float]
    first_location: Optional[float]
    cells: list[CellBreakingModel]


class MetricRequest(BaseModel):
    state_a: str
    state_b: str
    times: list[float] = Field(default_factory=list,
                               description="stability check times")
    budget: int = Field(default=200, ge=0, le=100000)
    tol: Optional[float] = Field(default=None, gt=0.0)


class BracketModel(BaseModel):
    lower: float
    upper: float
    width: float


class StabilityRow(BaseModel):
    t: float
    lower_after: float
    upper_before: float
    growth: float
    bound: float
    satisfied: bool


class MetricResponse(BaseModel):
    bracket: BracketModel
    stability: list[StabilityRow]


class ExampleRequest(BaseModel):
    name: Literal[EXAMPLE_NAMES]  # type: ignore[valid-type]
    t: float = Field(default=0.0, ge=0.0,
                     description="trajectory time (squeeze width for ex47)")


class ValidateRequest(BaseModel):
    state: str
    tol: Optional[float] = Field(default=None, gt=0.0)


class ViolationModel(BaseModel):
    code: str
    where: str
    detail: str


class ValidateResponse(BaseModel):
    ok: bool
    kind: str
    normalized: Optional[bool] = None
    slope_floor: Optional[float] = None
    violations: list[ViolationModel] = Field(default_factory=list)


class ResidualRequest(BaseModel):
    state: str
    t_max: float = Field(gt=0.0)
    time_nodes: int = Field(default=64, ge=2, le=100000)
    tol: Optional[float] = Field(default=None, gt=0.0)


class ResidualRow(BaseModel):
    name: str
    velocity: float
    density: float
    energy: float
    max_abs: float


class ResidualResponse(BaseModel):
    residuals: list[ResidualRow]


class HealthResponse(BaseModel):
    status: str
    version: str
