"""Built-in benchmark matrix over the Allee family f = u(1-u)(1+a u).

Runs constant a in {1, 1.5, 2, 3, 8} against q in {0, 1} and checks each
cell against its closed-form oracle: linear speed q+2, verdict flip at
a = 2, collapsed bounds and the pushed speed q + sqrt(a/2) + sqrt(2/a)
for a > 2, simulated leftward speed within 2%, and the pulled/pushed
decay classes at the extremes a = 1 and a = 8.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor

from . import config as cfg
from .pipeline import run_dispersion, run_selection, run_simulation
from .schemas import ReproducePayload, ReproduceRow

A_VALUES = (1.0, 1.5, 2.0, 3.0, 8.0)
Q_VALUES = (0.0, 1.0)
SPEED_RTOL = 0.02
C0_TOL = 1e-6


def pushed_speed_oracle(a: float) -> float:
    """Closed-form minimal speed of the constant-a Allee family, a >= 2."""
    return math.sqrt(a / 2.0) + math.sqrt(2.0 / a)


def expected_speed(a: float, q: float) -> float:
    return q + (2.0 if a <= 2.0 else pushed_speed_oracle(a))


def _cell_config(a: float, q: float, sim_overrides: dict | None) -> cfg.ProblemConfig:
    exp = expected_speed(a, q)
    t_end = min(120.0, math.floor(288.0 / exp))
    sim = {"t_end": t_end, "sides": ["left"], **(sim_overrides or {})}
    return cfg.ProblemConfig(
        problem=cfg.ProblemBlock(advection_q=q, a=f"{a:.12g}"),
        simulation=cfg.SimulationBlock(**sim),
    )


def run_cell(a: float, q: float, sim_overrides: dict | None = None) -> ReproduceRow:
    config = _cell_config(a, q, sim_overrides)
    failures: list[str] = []
    tag = f"a={a:g} q={q:g}"

    dispersion = run_dispersion(config)
    if abs(dispersion.c0 - (q + 2.0)) > C0_TOL:
        failures.append(f"{tag}: c0 = {dispersion.c0:.9g}, expected {q + 2:.9g}")

    selection = run_selection(config)
    want_linear = a <= 2.0
    if want_linear and selection.verdict != "linear":
        failures.append(f"{tag}: verdict {selection.verdict}, expected linear")
    if not want_linear:
        if selection.verdict != "nonlinear":
            failures.append(f"{tag}: verdict {selection.verdict}, expected nonlinear")
        elif not (selection.lower_bound_c and selection.lower_bound_c > dispersion.c0):
            failures.append(f"{tag}: certified lower bound missing or not above c0")
        oracle = q + pushed_speed_oracle(a)
        if selection.allee_bound_lower is None or abs(selection.allee_bound_lower - oracle) > 1e-9:
            failures.append(f"{tag}: collapsed bound {selection.allee_bound_lower}, expected {oracle:.9g}")

    simulation = run_simulation(config)
    front = simulation.fronts[0]
    exp = expected_speed(a, q)
    if abs(front.speed - exp) > SPEED_RTOL * exp:
        failures.append(
            f"{tag}: simulated speed {front.speed:.4f} outside {exp:.4f} +- {100*SPEED_RTOL:.0f}%"
        )
    if a == 1.0 and front.classification != "pulled":
        failures.append(f"{tag}: decay class {front.classification}, expected pulled")
    if a == 8.0 and front.classification != "pushed":
        failures.append(f"{tag}: decay class {front.classification}, expected pushed")

    return ReproduceRow(
        a=f"{a:g}",
        q=q,
        c0=dispersion.c0,
        verdict=selection.verdict,
        bound_lower=selection.allee_bound_lower,
        bound_upper=selection.allee_bound_upper,
        simulated_speed=front.speed,
        decay_classification=front.classification,
        expected_speed=exp,
        failures=failures,
    )


def _table_text(rows: list[ReproduceRow]) -> str:
    header = (
        f"{'a':>5} {'q':>4} {'c0':>10} {'verdict':>13} {'bounds':>20} "
        f"{'sim c*':>9} {'expected':>9} {'decay':>10} {'status':>7}\n"
    )
    lines = [header, "-" * len(header) + "\n"]
    for row in rows:
        if row.bound_lower is not None:
            bounds = f"({row.bound_lower:.4f}, {row.bound_upper:.4f})"
        else:
            bounds = "-"
        status = "ok" if not row.failures else "FAIL"
        lines.append(
            f"{row.a:>5} {row.q:>4g} {row.c0:>10.6f} {row.verdict:>13} {bounds:>20} "
            f"{row.simulated_speed:>9.4f} {row.expected_speed:>9.4f} "
            f"{row.decay_classification:>10} {status:>7}\n"
        )
    return "".join(lines)


def _summary_csv(rows: list[ReproduceRow]) -> str:
    buf = io.StringIO()
    buf.write(
        "a,q,c0,verdict,bound_lower,bound_upper,simulated_speed,expected_speed,"
        "decay_classification,n_failures\n"
    )
    for r in rows:
        lower = f"{r.bound_lower:.15g}" if r.bound_lower is not None else ""
        upper = f"{r.bound_upper:.15g}" if r.bound_upper is not None else ""
        buf.write(
            f"{r.a},{r.q:.15g},{r.c0:.15g},{r.verdict},{lower},{upper},"
            f"{r.simulated_speed:.15g},{r.expected_speed:.15g},"
            f"{r.decay_classification},{len(r.failures)}\n"
        )
    return buf.getvalue()


def run_reproduction(
    threads: int = 4,
    a_values=A_VALUES,
    q_values=Q_VALUES,
    sim_overrides: dict | None = None,
) -> ReproducePayload:
    """Run the full matrix; cells are independent and run concurrently."""
    cells = [(a, q) for a in a_values for q in q_values]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda cell: run_cell(*cell, sim_overrides), cells))
    else:
        rows = [run_cell(a, q, sim_overrides) for a, q in cells]
    failures = [msg for row in rows for msg in row.failures]
    return ReproducePayload(
        rows=rows,
        failures=failures,
        table_text=_table_text(rows),
        summary_csv=_summary_csv(rows),
    )


def write_reproduction(payload: ReproducePayload, out_dir: str) -> list[str]:
    import os

    os.makedirs(out_dir, exist_ok=True)
    table_path = os.path.join(out_dir, "reproduction_report.txt")
    csv_path = os.path.join(out_dir, "reproduction_summary.csv")
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write(payload.table_text)
        if payload.failures:
            fh.write("\nfailed assertions:\n")
            for msg in payload.failures:
                fh.write(f"  {msg}\n")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(payload.summary_csv)
    return [table_path, csv_path]


__all__ = [
    "run_reproduction",
    "run_cell",
    "write_reproduction",
    "pushed_speed_oracle",
    "expected_speed",
    "A_VALUES",
    "Q_VALUES",
]
