"""HTTP service exposing the analysis pipeline.

Run with:  uvicorn frontspeed.service:app

Error mapping: malformed requests fail pydantic validation (422 from the
framework); domain-level configuration problems return 400; violated
analysis assumptions (k(0) <= 0, inconsistent overrides) return 422;
simulation/estimator failures return 409.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .errors import (
    AssumptionViolated,
    BracketInvalid,
    BracketNotFound,
    ConfigError,
    FitRejected,
    FrontHitBoundary,
    Instability,
    MeshTooCoarse,
    NoConvergence,
)
from .pipeline import run_dispersion, run_recursion, run_selection, run_simulation
from .reproduce import run_reproduction
from .schemas import (
    DispersionPayload,
    DispersionRequest,
    HealthPayload,
    RecursionPayload,
    RecursionRequest,
    ReproducePayload,
    ReproduceRequest,
    SelectionPayload,
    SelectionRequest,
    SimulationPayload,
    SimulationRequest,
)

_CONFIG_ERRORS = (ConfigError, MeshTooCoarse)
_ASSUMPTION_ERRORS = (AssumptionViolated,)
_RUNTIME_ERRORS = (
    Instability,
    FrontHitBoundary,
    FitRejected,
    BracketInvalid,
    BracketNotFound,
    NoConvergence,
)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except _CONFIG_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except _ASSUMPTION_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except _RUNTIME_ERRORS as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(
        title="frontspeed",
        version=__version__,
        description=(
            "Spreading speeds, decay rates, and speed-selection verdicts for "
            "1-D periodic reaction-advection-diffusion fronts"
        ),
    )

    @app.get("/health", response_model=HealthPayload)
    def health() -> HealthPayload:
        return HealthPayload(status="ok", version=__version__)

    @app.post("/dispersion", response_model=DispersionPayload)
    def dispersion(request: DispersionRequest) -> DispersionPayload:
        return _guard(run_dispersion, request.config)

    @app.post("/select", response_model=SelectionPayload)
    def select(request: SelectionRequest) -> SelectionPayload:
        return _guard(run_selection, request.config)

    @app.post("/simulate", response_model=SimulationPayload)
    def simulate(request: SimulationRequest) -> SimulationPayload:
        return _guard(run_simulation, request.config)

    @app.post("/cstar-recursion", response_model=RecursionPayload)
    def cstar_recursion(request: RecursionRequest) -> RecursionPayload:
        return _guard(run_recursion, request.config)

    @app.post("/reproduce-paper", response_model=ReproducePayload)
    def reproduce(request: ReproduceRequest) -> ReproducePayload:
        return _guard(run_reproduction, threads=request.threads)

    return app


app = create_app()

__all__ = ["app", "create_app"]
