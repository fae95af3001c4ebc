"""Problem configuration: waveform grammar, INI parsing, and builders.

Coefficients are specified as waveform strings with three forms:

    1.0                               constant
    5 + 2*sin^2(2*pi*x/L)             offset + amplitude * sin^2
    1 + 0.5*sin(2*pi*x/L + 0.25)      offset + amplitude * shifted sine

That vocabulary covers every supported scenario without an expression
parser, and each form has closed-form extrema (the speed bounds need the
exact min/max of the Allee coefficient, not sampled approximations).
Configs parse from INI text (sections = blocks, key = value pairs) into
pydantic models that also serve as the service request schema; the
serializer emits a canonical INI that round-trips.
"""

from __future__ import annotations

import configparser
import io
import re
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from .core import (
    CoefficientField,
    PeriodicGrid,
    Reaction,
    make_coefficients,
    make_grid,
    make_kpp_allee,
)
from .errors import ConfigError

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_SIN2_RE = re.compile(
    rf"^\s*({_NUM})\s*\+\s*({_NUM})\s*\*\s*sin(?:\^2|2)\s*"
    rf"\(\s*2\s*\*\s*pi\s*\*\s*x\s*/\s*L\s*\)\s*$",
    re.IGNORECASE,
)
_SIN_RE = re.compile(
    rf"^\s*({_NUM})\s*\+\s*({_NUM})\s*\*\s*sin\s*"
    rf"\(\s*2\s*\*\s*pi\s*\*\s*x\s*/\s*L\s*(?:\+\s*({_NUM})\s*)?\)\s*$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class Waveform:
    """One periodic coefficient: constant, sin^2, or shifted sine."""

    kind: str  # "constant" | "sin2" | "sin"
    offset: float
    amp: float = 0.0
    phase: float = 0.0

    def sample(self, x, period_length: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        theta = 2.0 * np.pi * x / period_length
        if self.kind == "constant":
            return np.full_like(x, self.offset)
        if self.kind == "sin2":
            return self.offset + self.amp * np.sin(theta) ** 2
        return self.offset + self.amp * np.sin(theta + self.phase)

    def extrema(self) -> tuple[float, float]:
        """Exact (min, max) over one period."""
        if self.kind == "constant":
            return self.offset, self.offset
        if self.kind == "sin2":
            lo, hi = sorted((self.offset, self.offset + self.amp))
            return lo, hi
        return self.offset - abs(self.amp), self.offset + abs(self.amp)

    def to_spec(self) -> str:
        if self.kind == "constant":
            return f"{self.offset:.12g}"
        if self.kind == "sin2":
            return f"{self.offset:.12g} + {self.amp:.12g}*sin^2(2*pi*x/L)"
        return f"{self.offset:.12g} + {self.amp:.12g}*sin(2*pi*x/L + {self.phase:.12g})"


def parse_waveform(spec: str) -> Waveform:
    spec = spec.strip()
    try:
        return Waveform(kind="constant", offset=float(spec))
    except ValueError:
        pass
    m = _SIN2_RE.match(spec)
    if m:
        return Waveform(kind="sin2", offset=float(m.group(1)), amp=float(m.group(2)))
    m = _SIN_RE.match(spec)
    if m:
        phase = float(m.group(3)) if m.group(3) is not None else 0.0
        return Waveform(kind="sin", offset=float(m.group(1)), amp=float(m.group(2)), phase=phase)
    raise ConfigError(
        f"cannot parse waveform {spec!r}; expected a number, "
        f"'<offset> + <amp>*sin^2(2*pi*x/L)', or "
        f"'<offset> + <amp>*sin(2*pi*x/L + <phase>)'"
    )


class ProblemBlock(BaseModel):
    period_length: float = 1.0
    n_cells: int = 256
    direction_e: int = 1
    advection_q: float = 0.0
    reaction: str = "kpp_allee"
    a: str = "1.0"
    eta: str | None = None
    zeta: str | None = None

    @field_validator("direction_e")
    @classmethod
    def _check_e(cls, v):
        if v not in (1, -1):
            raise ValueError("direction_e must be +1 or -1")
        return v

    @field_validator("reaction")
    @classmethod
    def _check_reaction(cls, v):
        if v != "kpp_allee":
            raise ValueError("configurable reactions are limited to 'kpp_allee'")
        return v


class SimulationBlock(BaseModel):
    domain_periods: int = 620
    n_points: int = 8192
    dt: float = 0.0
    t_end: float = 80.0
    boundary: str = "clamped"
    scheme: str = "imex"
    level: float = 0.5
    fit_fraction: float = 0.4
    decay_band_low: float = 1e-8
    decay_band_high: float = 1e-3
    snapshot_stride: int = 0
    sides: list[str] = Field(default_factory=lambda: ["left", "right"])

    @field_validator("sides", mode="before")
    @classmethod
    def _split_sides(cls, v):
        if isinstance(v, str):
            v = [s.strip() for s in v.split(",") if s.strip()]
        for side in v:
            if side not in ("left", "right"):
                raise ValueError(f"side must be left or right, got {side!r}")
        return v


class SelectionBlock(BaseModel):
    epsilon_ladder: list[float] = Field(
        default_factory=lambda: [1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5]
    )
    shrink: float = 0.01
    write_grids: bool = True

    @field_validator("epsilon_ladder", mode="before")
    @classmethod
    def _split_ladder(cls, v):
        if isinstance(v, str):
            v = [float(s) for s in v.split(",") if s.strip()]
        if not v or any(e <= 0.0 for e in v):
            raise ValueError("epsilon_ladder entries must be positive")
        return v


class RecursionBlock(BaseModel):
    c_lo: float = 1.5
    c_hi: float = 3.0
    tol: float = 0.05
    omega: float = 0.5

    @field_validator("omega")
    @classmethod
    def _check_omega(cls, v):
        if not (0.0 < v < 1.0):
            raise ValueError("omega must lie strictly between 0 and 1")
        return v


class OutputBlock(BaseModel):
    out_dir: str = "."


class ProblemConfig(BaseModel):
    problem: ProblemBlock = Field(default_factory=ProblemBlock)
    simulation: SimulationBlock = Field(default_factory=SimulationBlock)
    selection: SelectionBlock = Field(default_factory=SelectionBlock)
    recursion: RecursionBlock = Field(default_factory=RecursionBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)


_BLOCKS = ("problem", "simulation", "selection", "recursion", "output")


def parse_config(text: str) -> ProblemConfig:
    """Parse INI text into a validated ProblemConfig."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse failure: {exc}") from exc
    data: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _BLOCKS:
            raise ConfigError(f"unknown config section [{section}]")
        data[section] = dict(parser.items(section))
    try:
        config = ProblemConfig(**data)
    except ValidationError as exc:
        raise ConfigError(f"config validation failure: {exc}") from exc
    validate_config(config)
    return config


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def validate_config(config: ProblemConfig) -> None:
    """Cross-field checks that pydantic cannot express locally."""
    p = config.problem
    a_wave = parse_waveform(p.a)
    if a_wave.extrema()[0] <= 0.0:
        raise ConfigError("allee coefficient a(x) must be positive everywhere")
    for name in ("eta", "zeta"):
        spec = getattr(p, name)
        if spec is not None:
            parse_waveform(spec)
    if p.period_length <= 0.0:
        raise ConfigError("period_length must be positive")
    if config.simulation.domain_periods < 40:
        raise ConfigError("domain_periods must be at least 40 (edge guards need room)")
    if not config.recursion.c_lo < config.recursion.c_hi:
        raise ConfigError("recursion needs c_lo < c_hi")


def to_ini(config: ProblemConfig) -> str:
    """Canonical INI serialization; parse(to_ini(c)) == c."""
    parser = configparser.ConfigParser()
    for block in _BLOCKS:
        model = getattr(config, block)
        section = {}
        for key, value in model.model_dump().items():
            if value is None:
                continue
            if isinstance(value, bool):
                section[key] = "true" if value else "false"
            elif isinstance(value, list):
                section[key] = ",".join(
                    f"{v:.12g}" if isinstance(v, float) else str(v) for v in value
                )
            elif isinstance(value, float):
                section[key] = f"{value:.12g}"
            else:
                section[key] = str(value)
        parser[block] = section
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Builders from config to core objects.


def build_grid(config: ProblemConfig) -> PeriodicGrid:
    return make_grid(config.problem.period_length, config.problem.n_cells)


def build_reaction(config: ProblemConfig, grid: PeriodicGrid) -> Reaction:
    wave = parse_waveform(config.problem.a)
    return make_kpp_allee(grid, lambda x: wave.sample(x, grid.period_length))


def allee_extrema(config: ProblemConfig) -> tuple[float, float]:
    return parse_waveform(config.problem.a).extrema()


def build_coefficients(
    config: ProblemConfig,
    grid: PeriodicGrid,
    reaction: Reaction,
    require_reaction_consistent: bool = False,
) -> CoefficientField:
    """Coefficient field from the config.

    eta/zeta default to the reaction's linearizations.  Explicit
    overrides are honored for linear-analysis commands; commands that use
    the full nonlinearity must reject inconsistent overrides, otherwise
    the criteria would silently mix two different problems.
    """
    p = config.problem
    L = grid.period_length
    eta_derived = reaction.eta_at(grid.nodes)
    zeta_derived = reaction.zeta_at(grid.nodes)
    eta = eta_derived
    zeta = zeta_derived
    if p.eta is not None:
        eta = parse_waveform(p.eta).sample(grid.nodes, L)
    if p.zeta is not None:
        zeta = parse_waveform(p.zeta).sample(grid.nodes, L)
    if require_reaction_consistent:
        if np.max(np.abs(eta - eta_derived)) > 1e-12:
            raise ConfigError(
                "explicit eta override disagrees with the reaction's df/du(x,0); "
                "drop the override for selection/simulation commands"
            )
        if np.max(np.abs(zeta - zeta_derived)) > 1e-12:
            raise ConfigError(
                "explicit zeta override disagrees with the reaction's df/du(x,1)"
            )
    return make_coefficients(grid, p.advection_q, eta, zeta, direction_e=p.direction_e)


__all__ = [
    "Waveform",
    "parse_waveform",
    "ProblemConfig",
    "ProblemBlock",
    "SimulationBlock",
    "SelectionBlock",
    "RecursionBlock",
    "OutputBlock",
    "parse_config",
    "load_config",
    "validate_config",
    "to_ini",
    "build_grid",
    "build_reaction",
    "build_coefficients",
    "allee_extrema",
]
