"""HTTP service exposing the solver pipeline.

One endpoint per pipeline stage, all accepting and returning states in the
canonical text form.  Error mapping is uniform across endpoints: text that
does not parse is a 400, a state that parses but fails admissibility (or an
operation that needs a property the state lacks) is a 422 carrying the
violation list.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__
from .eulerian import EulerianState, validate_eulerian
from .evolution import (breaking_times, builtin_test_functions, evolve,
                        evolve_eulerian, weak_residual)
from .examples import example
from .lagrangian import LagrangianState, Relabeling, validate_lagrangian
from .metric import stability_check, upper_distance
from .schemas import (BracketModel, BreakingRequest, BreakingResponse,
                      CellBreakingModel, EvolveRequest, ExampleRequest,
                      HealthResponse, MetricRequest, MetricResponse,
                      ResidualRequest, ResidualResponse, ResidualRow,
                      StabilityRow, StateResponse, TransformRequest,
                      ValidateRequest, ValidateResponse, ViolationModel)
from .stateio import parse_state, print_state
from .transform import to_eulerian, to_lagrangian
from .validation import InvalidStateError, StateFormatError


def _kind(obj) -> str:
    if isinstance(obj, EulerianState):
        return "eulerian"
    if isinstance(obj, LagrangianState):
        return "lagrangian"
    return "relabeling"


def _state_response(obj) -> StateResponse:
    return StateResponse(state=print_state(obj), kind=_kind(obj))


def _parse_evolvable(text: str):
    obj = parse_state(text)
    if isinstance(obj, Relabeling):
        raise StateFormatError("expected a state, got a relabeling")
    return obj


def _as_lagrangian(obj, tol):
    if isinstance(obj, EulerianState):
        return to_lagrangian(obj, tol=tol)
    return obj


def create_app() -> FastAPI:
    app = FastAPI(title="hs2", version=__version__)

    @app.exception_handler(StateFormatError)
    async def _format_error(request: Request, exc: StateFormatError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(InvalidStateError)
    async def _invalid_state(request: Request, exc: InvalidStateError):
        report = exc.report
        violations = [{"code": v.code, "where": v.where, "detail": v.detail}
                      for v in report.violations]
        detail = (f"invalid {report.kind} state: "
                  f"{len(report.violations)} violation(s)")
        return JSONResponse(status_code=422,
                            content={"detail": detail,
                                     "violations": violations})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        # a state that parsed but cannot support the requested operation
        return JSONResponse(status_code=422,
                            content={"detail": str(exc), "violations": []})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/evolve", response_model=StateResponse)
    async def evolve_endpoint(req: EvolveRequest) -> StateResponse:
        obj = _parse_evolvable(req.state)
        if isinstance(obj, EulerianState):
            report = validate_eulerian(obj, tol=req.tol)
            if not report.ok:
                raise InvalidStateError(report)
            return _state_response(evolve_eulerian(obj, req.t, tol=req.tol))
        report = validate_lagrangian(obj, tol=req.tol)
        if not report.ok:
            raise InvalidStateError(report)
        return _state_response(evolve(obj, req.t))

    @app.post("/transform", response_model=StateResponse)
    async def transform_endpoint(req: TransformRequest) -> StateResponse:
        obj = _parse_evolvable(req.state)
        if req.direction == "to-lagrangian":
            if isinstance(obj, LagrangianState):
                raise StateFormatError("state is already Lagrangian")
            return _state_response(to_lagrangian(obj, tol=req.tol))
        if isinstance(obj, EulerianState):
            raise StateFormatError("state is already Eulerian")
        return _state_response(to_eulerian(obj, tol=req.tol))

    @app.post("/breaking", response_model=BreakingResponse)
    async def breaking_endpoint(req: BreakingRequest) -> BreakingResponse:
        obj = _parse_evolvable(req.state)
        lag = _as_lagrangian(obj, req.tol)
        report = validate_lagrangian(lag, tol=req.tol)
        if not report.ok:
            raise InvalidStateError(report)
        result = breaking_times(lag)
        return BreakingResponse(
            first_time=result.first_time,
            first_location=result.first_location,
            cells=[CellBreakingModel(lo=c.lo, hi=c.hi, times=list(c.times))
                   for c in result.cells])

    @app.post("/metric", response_model=MetricResponse)
    async def metric_endpoint(req: MetricRequest) -> MetricResponse:
        a = _as_lagrangian(_parse_evolvable(req.state_a), req.tol)
        b = _as_lagrangian(_parse_evolvable(req.state_b), req.tol)
        bracket = upper_distance(a, b, budget=req.budget)
        rows = []
        for t in sorted(req.times):
            if t < 0:
                raise StateFormatError("stability times must be nonnegative")
            rep = stability_check(a, b, t, bracket=bracket)
            rows.append(StabilityRow(t=rep.t, lower_after=rep.lower_after,
                                     upper_before=rep.upper_before,
                                     growth=rep.growth, bound=rep.bound,
                                     satisfied=rep.satisfied))
        return MetricResponse(
            bracket=BracketModel(lower=bracket.lower, upper=bracket.upper,
                                 width=bracket.width),
            stability=rows)

    @app.post("/example", response_model=StateResponse)
    async def example_endpoint(req: ExampleRequest) -> StateResponse:
        try:
            state = example(req.name, req.t)
        except ValueError as exc:
            # a time the example does not support is a bad request, not an
            # invalid state
            raise StateFormatError(str(exc)) from exc
        return _state_response(state)

    @app.post("/validate", response_model=ValidateResponse)
    async def validate_endpoint(req: ValidateRequest) -> ValidateResponse:
        obj = parse_state(req.state)
        if isinstance(obj, Relabeling):
            # the constructor enforces admissibility, so parsing sufficed
            return ValidateResponse(ok=True, kind="relabeling")
        if isinstance(obj, EulerianState):
            report = validate_eulerian(obj, tol=req.tol)
        else:
            report = validate_lagrangian(obj, tol=req.tol)
        return ValidateResponse(
            ok=report.ok, kind=report.kind, normalized=report.normalized,
            slope_floor=report.slope_floor,
            violations=[ViolationModel(code=v.code, where=v.where,
                                       detail=v.detail)
                        for v in report.violations])

    @app.post("/residual", response_model=ResidualResponse)
    async def residual_endpoint(req: ResidualRequest) -> ResidualResponse:
        obj = _parse_evolvable(req.state)
        if isinstance(obj, LagrangianState):
            report = validate_lagrangian(obj, tol=req.tol)
            if not report.ok:
                raise InvalidStateError(report)
            obj = to_eulerian(obj, tol=req.tol)
        rows = []
        for fn in builtin_test_functions(req.t_max):
            res = weak_residual(obj, req.t_max, fn, req.time_nodes,
                                tol=req.tol)
            rows.append(ResidualRow(name=res.name, velocity=res.velocity,
                                    density=res.density, energy=res.energy,
                                    max_abs=res.max_abs()))
        return ResidualResponse(residuals=rows)

    return app


app = create_app()
