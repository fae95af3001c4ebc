"""Pydantic response models shared by the HTTP service and the CLI.

Requests reuse ProblemConfig from config.py; responses carry both the
structured numbers and the rendered report/CSV payloads so that a thin
client can write byte-identical files without redoing any computation.
"""

from __future__ import annotations

from pydantic import BaseModel

from .config import ProblemConfig


class DispersionRequest(BaseModel):
    config: ProblemConfig


class DispersionPayload(BaseModel):
    c0: float
    mu_bar: float
    k0: float
    kbar0: float
    stability_label: str
    convexity_ok: bool
    weak_growth_warning: bool
    direction_e: int
    sweep_csv: str
    report_text: str


class SelectionRequest(BaseModel):
    config: ProblemConfig


class SelectionPayload(BaseModel):
    verdict: str
    c0: float
    criterion_max_linear: float | None
    criterion_min_nonlinear: float | None
    lower_bound_c: float | None
    upper_bound_c: float | None
    epsilon_used: float | None
    kpp_shortcut: bool
    allee_bound_lower: float | None
    allee_bound_upper: float | None
    report_text: str
    linear_grid_csv: str | None
    nonlinear_grid_csv: str | None


class SimulationRequest(BaseModel):
    config: ProblemConfig


class FrontPayload(BaseModel):
    side: str
    speed: float
    level: float
    decay_rate: float
    classification: str
    fit_t_start: float
    fit_t_end: float
    r_squared: float
    c0: float
    mu1_candidate: float
    mu2_candidate: float
    tail_points: int
    report_text: str


class SimulationPayload(BaseModel):
    fronts: list[FrontPayload]
    snapshots_csv: str | None


class RecursionRequest(BaseModel):
    config: ProblemConfig


class RecursionPayload(BaseModel):
    speed: float
    c_lo: float
    c_hi: float
    tol: float
    omega: float
    report_text: str


class ReproduceRequest(BaseModel):
    threads: int = 4


class ReproduceRow(BaseModel):
    a: str
    q: float
    c0: float
    verdict: str
    bound_lower: float | None
    bound_upper: float | None
    simulated_speed: float
    decay_classification: str
    expected_speed: float
    failures: list[str]


class ReproducePayload(BaseModel):
    rows: list[ReproduceRow]
    failures: list[str]
    table_text: str
    summary_csv: str


class HealthPayload(BaseModel):
    status: str
    version: str


__all__ = [
    "DispersionRequest",
    "DispersionPayload",
    "SelectionRequest",
    "SelectionPayload",
    "SimulationRequest",
    "FrontPayload",
    "SimulationPayload",
    "RecursionRequest",
    "RecursionPayload",
    "ReproduceRequest",
    "ReproduceRow",
    "ReproducePayload",
    "HealthPayload",
]
