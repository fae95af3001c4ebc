"""Handlers mapping ProblemConfig requests to response payloads.

Both front ends call these: the FastAPI service returns the payloads as
JSON, the CLI calls them in-process (or fetches them from a server) and
writes the embedded reports/CSVs to disk.  Keeping the file rendering
here makes local and remote runs byte-identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from . import config as cfg
from . import dispersion as disp
from . import selection as sel
from . import semiflow as sf
from .schemas import (
    DispersionPayload,
    FrontPayload,
    RecursionPayload,
    SelectionPayload,
    SimulationPayload,
)

STABILITY_TOL = 1e-10


def _stability_label(kbar0: float) -> str:
    if kbar0 < -STABILITY_TOL:
        return "stable"
    if kbar0 > STABILITY_TOL:
        return "unstable"
    return "degenerate"


def run_dispersion(config: cfg.ProblemConfig) -> DispersionPayload:
    grid = cfg.build_grid(config)
    reaction = cfg.build_reaction(config, grid)
    coeffs = cfg.build_coefficients(config, grid, reaction)
    result = disp.linear_speed(coeffs)
    label = _stability_label(result.kbar0)
    report = "".join(
        f"{key} = {value}\n"
        for key, value in [
            ("c0", f"{result.c0:.15g}"),
            ("mu_bar", f"{result.mu_bar:.15g}"),
            ("k0", f"{result.k0:.15g}"),
            ("kbar0", f"{result.kbar0:.15g}"),
            ("stability", label),
            ("convexity_ok", "true" if result.convexity_ok else "false"),
            ("weak_growth_warning", "true" if result.weak_growth_warning else "false"),
            ("direction_e", f"{result.direction_e:+d}"),
            ("k0_positive_tol", f"{disp.K0_POSITIVE_TOL:.15g}"),
            ("golden_tol", f"{disp.GOLDEN_TOL:.15g}"),
        ]
    )
    return DispersionPayload(
        c0=result.c0,
        mu_bar=result.mu_bar,
        k0=result.k0,
        kbar0=result.kbar0,
        stability_label=label,
        convexity_ok=result.convexity_ok,
        weak_growth_warning=result.weak_growth_warning,
        direction_e=result.direction_e,
        sweep_csv=disp.sweep_csv(result),
        report_text=report,
    )


def run_selection(config: cfg.ProblemConfig) -> SelectionPayload:
    grid = cfg.build_grid(config)
    reaction = cfg.build_reaction(config, grid)
    coeffs = cfg.build_coefficients(config, grid, reaction, require_reaction_consistent=True)
    extrema = cfg.allee_extrema(config)
    report = sel.select(
        coeffs,
        reaction,
        epsilon_ladder=tuple(config.selection.epsilon_ladder),
        shrink=config.selection.shrink,
        allee_extrema=extrema,
    )
    write_grids = config.selection.write_grids
    return SelectionPayload(
        verdict=report.verdict,
        c0=report.c0,
        criterion_max_linear=report.criterion_max_linear,
        criterion_min_nonlinear=report.criterion_min_nonlinear,
        lower_bound_c=report.lower_bound_c,
        upper_bound_c=report.upper_bound_c,
        epsilon_used=report.epsilon_used,
        kpp_shortcut=report.kpp_shortcut,
        allee_bound_lower=report.allee_bounds[0] if report.allee_bounds else None,
        allee_bound_upper=report.allee_bounds[1] if report.allee_bounds else None,
        report_text=sel.report_text(report),
        linear_grid_csv=sel.grid_csv(report.linear_grid)
        if (write_grids and report.linear_grid)
        else None,
        nonlinear_grid_csv=sel.grid_csv(report.nonlinear_grid)
        if (write_grids and report.nonlinear_grid)
        else None,
    )


def build_domain(config: cfg.ProblemConfig) -> sf.SimulationDomain:
    s = config.simulation
    L = config.problem.period_length
    half = 0.5 * s.domain_periods * L
    return sf.SimulationDomain(
        x_min=-half,
        x_max=half,
        n_points=s.n_points,
        dt=s.dt,
        t_end=s.t_end,
        boundary=s.boundary,
        scheme=s.scheme,
    )


def _front_payload(m: sf.FrontMeasurement) -> FrontPayload:
    return FrontPayload(
        side=m.side,
        speed=m.speed,
        level=m.level,
        decay_rate=m.decay_rate,
        classification=m.classification,
        fit_t_start=m.fit_window[0],
        fit_t_end=m.fit_window[1],
        r_squared=m.r_squared,
        c0=m.c0,
        mu1_candidate=m.mu_candidates[0],
        mu2_candidate=m.mu_candidates[1],
        tail_points=m.tail_points,
        report_text=sf.measurement_text(m),
    )


def run_simulation(config: cfg.ProblemConfig, threads: int = 1) -> SimulationPayload:
    grid = cfg.build_grid(config)
    reaction = cfg.build_reaction(config, grid)
    coeffs = cfg.build_coefficients(config, grid, reaction, require_reaction_consistent=True)
    domain = build_domain(config)
    s = config.simulation

    def measure(side: str):
        snapshots: list = [] if s.snapshot_stride > 0 else None
        m = sf.measure_spreading_speed(
            domain,
            coeffs,
            reaction,
            side=side,
            level=s.level,
            fit_fraction=s.fit_fraction,
            decay_band=(s.decay_band_low, s.decay_band_high),
            snapshot_stride=s.snapshot_stride,
            snapshots=snapshots,
        )
        return m, snapshots

    sides = list(s.sides)
    if threads > 1 and len(sides) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(sides))) as pool:
            results = list(pool.map(measure, sides))
    else:
        results = [measure(side) for side in sides]

    snapshots_csv = None
    frames = [snap for _, snap in results if snap]
    if frames:
        snapshots_csv = sf.snapshots_csv(
            [frame for snap in frames for frame in snap], domain.x
        )
    return SimulationPayload(
        fronts=[_front_payload(m) for m, _ in results],
        snapshots_csv=snapshots_csv,
    )


def run_recursion(config: cfg.ProblemConfig) -> RecursionPayload:
    grid = cfg.build_grid(config)
    reaction = cfg.build_reaction(config, grid)
    coeffs = cfg.build_coefficients(config, grid, reaction, require_reaction_consistent=True)
    r = config.recursion
    settings = sf.RecursionSettings(omega=r.omega)
    speed = sf.weinberger_recursion_speed(
        coeffs, reaction, r.c_lo, r.c_hi, tol=r.tol, settings=settings
    )
    report = "".join(
        f"{key} = {value}\n"
        for key, value in [
            ("speed", f"{speed:.15g}"),
            ("c_lo", f"{r.c_lo:.15g}"),
            ("c_hi", f"{r.c_hi:.15g}"),
            ("tol", f"{r.tol:.15g}"),
            ("omega", f"{r.omega:.15g}"),
        ]
    )
    return RecursionPayload(
        speed=speed, c_lo=r.c_lo, c_hi=r.c_hi, tol=r.tol, omega=r.omega, report_text=report
    )


# ---------------------------------------------------------------------------
# File writers used by the CLI (and by anyone scripting the pipeline).


def _write(path: str, content: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(content)
    return path


def write_dispersion(payload: DispersionPayload, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    return [
        _write(os.path.join(out_dir, "dispersion_sweep.csv"), payload.sweep_csv),
        _write(os.path.join(out_dir, "dispersion_report.txt"), payload.report_text),
    ]


def write_selection(payload: SelectionPayload, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = [_write(os.path.join(out_dir, "selection_report.txt"), payload.report_text)]
    if payload.linear_grid_csv is not None:
        written.append(
            _write(os.path.join(out_dir, "selection_grid_linear.csv"), payload.linear_grid_csv)
        )
    if payload.nonlinear_grid_csv is not None:
        written.append(
            _write(
                os.path.join(out_dir, "selection_grid_nonlinear.csv"),
                payload.nonlinear_grid_csv,
            )
        )
    return written


def write_simulation(payload: SimulationPayload, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for front in payload.fronts:
        written.append(
            _write(os.path.join(out_dir, f"front_{front.side}.txt"), front.report_text)
        )
    if payload.snapshots_csv is not None:
        written.append(_write(os.path.join(out_dir, "snapshots.csv"), payload.snapshots_csv))
    return written


def write_recursion(payload: RecursionPayload, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    return [_write(os.path.join(out_dir, "recursion_report.txt"), payload.report_text)]


__all__ = [
    "run_dispersion",
    "run_selection",
    "run_simulation",
    "run_recursion",
    "build_domain",
    "write_dispersion",
    "write_selection",
    "write_simulation",
    "write_recursion",
]
