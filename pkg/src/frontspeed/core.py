"""Grids, periodic coefficient fields, and reaction nonlinearities.

Everything here is immutable after construction and safe to share across
threads.  Coefficient closures are sampled once onto the grid nodes so
that downstream operators are reproducible and hashable for caching.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigError

_REL_TOL = 1e-12


def _as_samples(grid: "PeriodicGrid", value) -> np.ndarray:
    """Sample a scalar, array, or callable onto the grid nodes."""
    if callable(value):
        out = np.asarray(value(grid.nodes), dtype=float)
    else:
        out = np.asarray(value, dtype=float)
        if out.ndim == 0:
            out = np.full(grid.n_cells, float(out))
    if out.shape != (grid.n_cells,):
        raise ConfigError(
            f"coefficient samples have shape {out.shape}, expected ({grid.n_cells},)"
        )
    if not np.all(np.isfinite(out)):
        raise ConfigError("coefficient samples contain non-finite values")
    return out


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform discretization of one periodicity cell [0, L)."""

    period_length: float
    n_cells: int
    spacing: float
    nodes: np.ndarray

    def __post_init__(self):
        if abs(self.spacing * self.n_cells - self.period_length) > _REL_TOL * self.period_length:
            raise ConfigError("spacing * n_cells must equal period_length")

    def wrap(self, x: np.ndarray) -> np.ndarray:
        """Map arbitrary positions into [0, L)."""
        return np.mod(x, self.period_length)


def make_grid(period_length: float, n_cells: int) -> PeriodicGrid:
    """Build a uniform periodic grid; rejects grids too coarse for
    second-order stencils (n_cells < 8)."""
    if not (period_length > 0.0 and np.isfinite(period_length)):
        raise ConfigError(f"period_length must be positive, got {period_length}")
    if n_cells < 8:
        raise ConfigError(f"n_cells must be >= 8, got {n_cells}")
    spacing = period_length / n_cells
    nodes = spacing * np.arange(n_cells, dtype=float)
    return PeriodicGrid(float(period_length), int(n_cells), spacing, nodes)


@dataclass(frozen=True)
class CoefficientField:
    """Node samples of the periodic problem coefficients.

    advection_q is constant in 1-D (the divergence-free condition forces
    it); eta = df/du at u=0 and zeta = df/du at u=1 carry the
    heterogeneity.  direction_e is the +-1 propagation direction.
    """

    grid: PeriodicGrid
    advection_q: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    direction_e: int = +1
    _fingerprint: str = field(default="", compare=False)

    def __post_init__(self):
        if self.direction_e not in (+1, -1):
            raise ConfigError(f"direction_e must be +1 or -1, got {self.direction_e}")
        for name in ("advection_q", "eta", "zeta"):
            arr = getattr(self, name)
            if arr.shape != (self.grid.n_cells,):
                raise ConfigError(f"{name} samples must match the grid")
        if np.ptp(self.advection_q) > _REL_TOL * (1.0 + np.max(np.abs(self.advection_q))):
            raise ConfigError(
                "non-constant advection is rejected: in 1-D the divergence-free "
                "condition forces q to be constant"
            )
        if not self._fingerprint:
            h = hashlib.sha1()
            h.update(np.float64(self.grid.period_length).tobytes())
            h.update(np.int64(self.grid.n_cells).tobytes())
            h.update(np.int64(self.direction_e).tobytes())
            for arr in (self.advection_q, self.eta, self.zeta):
                h.update(np.ascontiguousarray(arr).tobytes())
            object.__setattr__(self, "_fingerprint", h.hexdigest())

    @property
    def q(self) -> float:
        """The constant advection value."""
        return float(self.advection_q[0])

    @property
    def fingerprint(self) -> str:
        return self._fingerprint

    def with_direction(self, direction_e: int) -> "CoefficientField":
        if direction_e == self.direction_e:
            return self
        return make_coefficients(
            self.grid, self.q, self.eta, self.zeta, direction_e=direction_e
        )


def make_coefficients(
    grid: PeriodicGrid,
    advection_q,
    eta,
    zeta,
    direction_e: int = +1,
) -> CoefficientField:
    """Sample (possibly callable) coefficients onto the grid."""
    return CoefficientField(
        grid=grid,
        advection_q=_as_samples(grid, advection_q),
        eta=_as_samples(grid, eta),
        zeta=_as_samples(grid, zeta),
        direction_e=int(direction_e),
    )


@dataclass(frozen=True)
class Reaction:
    """Reaction nonlinearity f(x, u) on [0, 1] with its u-derivative.

    kind is "kpp_allee" for f = u(1-u)(1+a(x)u) or "tabulated" for an
    arbitrary callback pair.  Construction checks f(x,0) = f(x,1) = 0 and
    f >= 0 on a (x, u) sample lattice.
    """

    kind: str
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    derivative_u: Callable[[np.ndarray, np.ndarray], np.ndarray]
    allee_a: Callable[[np.ndarray], np.ndarray] | None = None

    def eta_at(self, x: np.ndarray) -> np.ndarray:
        """df/du at u = 0."""
        x = np.asarray(x, dtype=float)
        return np.asarray(self.derivative_u(x, np.zeros_like(x)), dtype=float)

    def zeta_at(self, x: np.ndarray) -> np.ndarray:
        """df/du at u = 1."""
        x = np.asarray(x, dtype=float)
        return np.asarray(self.derivative_u(x, np.ones_like(x)), dtype=float)


def _check_reaction(reaction: Reaction, grid: PeriodicGrid) -> None:
    x = grid.nodes
    zero = np.abs(reaction.evaluate(x, np.zeros_like(x)))
    one = np.abs(reaction.evaluate(x, np.ones_like(x)))
    if zero.max() > _REL_TOL or one.max() > _REL_TOL:
        raise ConfigError("reaction must vanish at u=0 and u=1")
    for u in np.arange(0.0, 1.0 + 1e-9, 0.05):
        vals = reaction.evaluate(x, np.full_like(x, u))
        if np.min(vals) < -_REL_TOL:
            raise ConfigError(f"reaction must be nonnegative on [0,1]; f(x,{u:g}) < 0")


def make_kpp_allee(grid: PeriodicGrid, a) -> Reaction:
    """Allee-type reaction f = u(1-u)(1+a(x)u) with a(x) >= 0.

    `a` may be a scalar, node samples, or a callable of x; scalars and
    callables are kept exact so f can be evaluated off the cell grid
    (simulation domains), samples are extended periodically by linear
    interpolation.
    """
    if callable(a):
        a_fn = lambda x: np.asarray(a(np.asarray(x, dtype=float)), dtype=float)
    else:
        arr = np.asarray(a, dtype=float)
        if arr.ndim == 0:
            val = float(arr)
            a_fn = lambda x, v=val: np.full_like(np.asarray(x, dtype=float), v)
        else:
            if arr.shape != (grid.n_cells,):
                raise ConfigError("allee coefficient samples must match the grid")
            xp = np.append(grid.nodes, grid.period_length)
            fp = np.append(arr, arr[0])
            a_fn = lambda x: np.interp(grid.wrap(np.asarray(x, dtype=float)), xp, fp)

    if np.min(a_fn(grid.nodes)) < 0.0:
        raise ConfigError("allee coefficient a(x) must be nonnegative")

    def f(x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return u * (1.0 - u) * (1.0 + a_fn(x) * u)

    def df(x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        a_val = a_fn(x)
        # d/du [u(1-u)(1+au)] = 1 + 2(a-1)u - 3au^2
        return 1.0 + 2.0 * (a_val - 1.0) * u - 3.0 * a_val * u * u

    reaction = Reaction(kind="kpp_allee", evaluate=f, derivative_u=df, allee_a=a_fn)
    _check_reaction(reaction, grid)
    return reaction


def make_tabulated_reaction(
    grid: PeriodicGrid,
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray],
    derivative_u: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> Reaction:
    """Wrap arbitrary callbacks as a Reaction, with the construction checks."""
    reaction = Reaction(kind="tabulated", evaluate=evaluate, derivative_u=derivative_u)
    _check_reaction(reaction, grid)
    return reaction


def coefficients_from_reaction(
    grid: PeriodicGrid,
    advection_q: float,
    reaction: Reaction,
    direction_e: int = +1,
) -> CoefficientField:
    """Coefficient field with eta/zeta derived from the reaction's
    linearizations at u=0 and u=1."""
    return make_coefficients(
        grid,
        advection_q,
        reaction.eta_at(grid.nodes),
        reaction.zeta_at(grid.nodes),
        direction_e=direction_e,
    )


__all__ = [
    "PeriodicGrid",
    "CoefficientField",
    "Reaction",
    "make_grid",
    "make_coefficients",
    "make_kpp_allee",
    "make_tabulated_reaction",
    "coefficients_from_reaction",
    "replace",
]
