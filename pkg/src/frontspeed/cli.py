"""Command-line front end.

Subcommands: dispersion, select, simulate, cstar-recursion,
reproduce-paper.  By default the pipeline runs in-process; with
--server URL the same request is POSTed to a running service and the
returned payload is written to disk, byte-identical to a local run.

Exit codes: 0 ok, 1 config error, 2 assumption violation, 3 simulation
failure, 4 reproduction-suite failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ProblemConfig, load_config
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
    SpeedBelowLinear,
    TailNotResolved,
)
from .pipeline import (
    run_dispersion,
    run_recursion,
    run_selection,
    run_simulation,
    write_dispersion,
    write_recursion,
    write_selection,
    write_simulation,
)
from .reproduce import run_reproduction, write_reproduction
from .schemas import (
    DispersionPayload,
    RecursionPayload,
    ReproducePayload,
    SelectionPayload,
    SimulationPayload,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ASSUMPTION = 2
EXIT_SIMULATION = 3
EXIT_REPRODUCTION = 4

log = logging.getLogger("frontspeed")

_CONFIG_ERRORS = (ConfigError, MeshTooCoarse, OSError)
_SIMULATION_ERRORS = (
    Instability,
    FrontHitBoundary,
    FitRejected,
    BracketInvalid,
    BracketNotFound,
    NoConvergence,
    SpeedBelowLinear,
    TailNotResolved,
)

_ENDPOINTS = {
    "dispersion": ("/dispersion", DispersionPayload),
    "select": ("/select", SelectionPayload),
    "simulate": ("/simulate", SimulationPayload),
    "cstar-recursion": ("/cstar-recursion", RecursionPayload),
    "reproduce-paper": ("/reproduce-paper", ReproducePayload),
}


def _remote_call(server: str, command: str, body: dict):
    import httpx

    path, payload_model = _ENDPOINTS[command]
    response = httpx.post(server.rstrip("/") + path, json=body, timeout=1800.0)
    if response.status_code != 200:
        detail = response.json().get("detail", response.text)
        if response.status_code == 400:
            raise ConfigError(str(detail))
        if response.status_code == 422:
            raise AssumptionViolated(str(detail))
        raise FrontHitBoundary(str(detail))
    return payload_model.model_validate(response.json())


def _dispatch(command: str, config: ProblemConfig | None, args) -> "object":
    if args.server:
        if command == "reproduce-paper":
            body = {"threads": args.threads}
        else:
            body = {"config": config.model_dump()}
        return _remote_call(args.server, command, body)
    if command == "dispersion":
        return run_dispersion(config)
    if command == "select":
        return run_selection(config)
    if command == "simulate":
        return run_simulation(config, threads=args.threads)
    if command == "cstar-recursion":
        return run_recursion(config)
    return run_reproduction(threads=args.threads)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frontspeed",
        description=(
            "Spreading speeds, decay rates, and speed-selection verdicts for "
            "1-D periodic reaction-advection-diffusion fronts"
        ),
    )
    parser.add_argument("--config", help="problem configuration file (INI)")
    parser.add_argument("--out-dir", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=4, help="worker threads")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--server", default=None, help="run against a service URL instead of in-process")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dispersion", help="growth-rate sweep, linear speed, stability")
    sub.add_parser("select", help="linear vs nonlinear selection verdict")
    sub.add_parser("simulate", help="direct front simulation and measurement")
    sub.add_parser("cstar-recursion", help="minimal speed via the shift-and-recurse estimator")
    sub.add_parser("reproduce-paper", help="run the built-in Allee benchmark matrix")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    needs_config = args.command != "reproduce-paper"
    try:
        config = None
        if needs_config:
            if args.config is None and args.server is None:
                raise ConfigError(f"{args.command} requires --config")
            config = load_config(args.config) if args.config else ProblemConfig()
        elif args.config:
            config = load_config(args.config)  # validates, out_dir may be used

        out_dir = args.out_dir or (config.output.out_dir if config else ".")
        payload = _dispatch(args.command, config, args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssumptionViolated as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except _SIMULATION_ERRORS as exc:
        print(f"simulation failure: {exc}", file=sys.stderr)
        return EXIT_SIMULATION

    if args.command == "dispersion":
        files = write_dispersion(payload, out_dir)
        print(payload.report_text, end="")
    elif args.command == "select":
        files = write_selection(payload, out_dir)
        print(payload.report_text, end="")
    elif args.command == "simulate":
        files = write_simulation(payload, out_dir)
        for front in payload.fronts:
            print(f"[{front.side}] speed={front.speed:.6g} "
                  f"decay={front.decay_rate:.6g} class={front.classification}")
    elif args.command == "cstar-recursion":
        files = write_recursion(payload, out_dir)
        print(payload.report_text, end="")
    else:
        files = write_reproduction(payload, out_dir)
        print(payload.table_text, end="")
        if payload.failures:
            print("failed assertions:", file=sys.stderr)
            for msg in payload.failures:
                print(f"  {msg}", file=sys.stderr)
            return EXIT_REPRODUCTION

    for path in files:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
