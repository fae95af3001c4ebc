"""Linear vs nonlinear speed-selection criteria and speed bounds.

Both criteria evaluate the same margin expression

    G(u, x) = -2 mu^2 u Psi - 2 u (Psi')^2 / Psi - 4 mu u e Psi'
              + Psi f(x, u) / (u (1 - u)) - eta(x) Psi

on a (u, x) grid, where Psi is the positive eigenfunction at decay rate
mu.  At mu = mu_bar (the critical decay, speed c0) G <= 0 everywhere
certifies linear selection: the sigmoid candidate is then an upper
solution at c0.  At mu = mu2(c0 + eps) G > 0 everywhere certifies
nonlinear selection with the bound c* >= c0 + eps: a shrunk sigmoid is a
lower solution.  The wave residual of a sigmoid factorizes as
phi*(1-phi)/Psi * G(phi, x), which is what makes a u-grid equivalent to
an s-grid: phi sweeps (0,1) bijectively in s.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import CoefficientField, Reaction
from .dispersion import DispersionResult, decay_rates, linear_speed
from .errors import SpeedBelowLinear, TailNotResolved
from .operators import evaluate_wave_operator, periodic_d1
from .profiles import SIGMOID_MU2, SigmoidProfile

STRICT_TOL = 1e-9
EPSILON_LADDER = (1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5)
LEFT_TAIL_LEVEL = 1e-6
RIGHT_TAIL_FLOOR = 0.01
DEFAULT_SHRINK = 0.01

VERDICT_LINEAR = "linear"
VERDICT_NONLINEAR = "nonlinear"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CriterionGrid:
    """Margin samples G(u, x) on the evaluation lattice."""

    u: np.ndarray
    x: np.ndarray
    values: np.ndarray
    mu: float


@dataclass(frozen=True)
class SelectionReport:
    verdict: str
    c0: float
    criterion_max_linear: float | None
    criterion_min_nonlinear: float | None
    lower_bound_c: float | None
    upper_bound_c: float | None
    epsilon_used: float | None
    kpp_shortcut: bool
    allee_bounds: tuple[float, float] | None
    linear_grid: CriterionGrid | None
    nonlinear_grid: CriterionGrid | None


def default_u_grid() -> np.ndarray:
    """Mixed geometric + uniform u-grid on [1e-4, 1-1e-4], >= 400 points;
    geometric tails resolve both endpoints."""
    lo, hi = 1e-4, 1.0 - 1e-4
    geom = np.geomspace(lo, 0.5, 160)
    return np.unique(np.concatenate([geom, np.linspace(lo, hi, 200), 1.0 - geom]))


def candidate_margin(
    u: np.ndarray,
    mu: float,
    psi: np.ndarray,
    coeffs: CoefficientField,
    reaction: Reaction,
) -> np.ndarray:
    """Evaluate G on u (any shape broadcastable against the x nodes)."""
    grid = coeffs.grid
    x = grid.nodes.reshape(1, -1)
    psi_row = psi.reshape(1, -1)
    dpsi = periodic_d1(psi, grid.spacing).reshape(1, -1)
    eta = coeffs.eta.reshape(1, -1)
    e = coeffs.direction_e

    u = np.asarray(u, dtype=float)
    f = reaction.evaluate(np.broadcast_to(x, np.broadcast_shapes(u.shape, x.shape)), u)
    return (
        -2.0 * mu**2 * u * psi_row
        - 2.0 * u * dpsi**2 / psi_row
        - 4.0 * mu * u * e * dpsi
        + psi_row * f / (u * (1.0 - u))
        - eta * psi_row
    )


def linear_criterion(
    coeffs: CoefficientField,
    reaction: Reaction,
    dispersion: DispersionResult | None = None,
    u_grid: np.ndarray | None = None,
) -> tuple[float, CriterionGrid]:
    """Margin at the critical decay mu_bar; max <= 0 certifies c* = c0."""
    if dispersion is None:
        dispersion = linear_speed(coeffs)
    u = (default_u_grid() if u_grid is None else np.asarray(u_grid)).reshape(-1, 1)
    values = candidate_margin(u, dispersion.mu_bar, dispersion.psi_mu_bar, coeffs, reaction)
    grid = CriterionGrid(u=u.ravel(), x=coeffs.grid.nodes, values=values, mu=dispersion.mu_bar)
    return float(np.max(values)), grid


def nonlinear_criterion(
    coeffs: CoefficientField,
    reaction: Reaction,
    epsilon: float,
    dispersion: DispersionResult | None = None,
    u_grid: np.ndarray | None = None,
) -> tuple[float, float | None, CriterionGrid]:
    """Margin at the fast decay mu2(c0 + epsilon).

    Returns (min value, certified lower bound or None, grid); the bound
    c* >= c0 + epsilon is certified only by a strictly positive margin.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if dispersion is None:
        dispersion = linear_speed(coeffs)
    c = dispersion.c0 + epsilon
    rates = decay_rates(coeffs, c, dispersion)
    u = (default_u_grid() if u_grid is None else np.asarray(u_grid)).reshape(-1, 1)
    values = candidate_margin(u, rates.mu2, rates.psi2, coeffs, reaction)
    grid = CriterionGrid(u=u.ravel(), x=coeffs.grid.nodes, values=values, mu=rates.mu2)
    min_value = float(np.min(values))
    lower_bound = c if min_value >= STRICT_TOL else None
    return min_value, lower_bound, grid


def kpp_shortcut_applies(
    coeffs: CoefficientField, reaction: Reaction, u_grid: np.ndarray | None = None
) -> bool:
    """True when f(x, u) <= eta(x) u on the whole (u, x) lattice, in which
    case linear selection holds outright."""
    u = (default_u_grid() if u_grid is None else np.asarray(u_grid)).reshape(-1, 1)
    x = coeffs.grid.nodes.reshape(1, -1)
    f = reaction.evaluate(np.broadcast_to(x, np.broadcast_shapes(u.shape, x.shape)), u)
    return bool(np.max(f - coeffs.eta.reshape(1, -1) * u) <= 1e-12)


def speed_bounds_kpp_allee(q: float, a_min: float, a_max: float) -> tuple[float, float]:
    """Closed-form minimal-speed bounds for f = u(1-u)(1+a(x)u) when
    a(x) > 2 everywhere: q + sqrt(m/2) + sqrt(2/m) < c* < the same at M."""
    if not a_min > 2.0:
        raise ValueError(f"bounds require min a(x) > 2, got {a_min}")
    if a_max < a_min:
        raise ValueError("a_max must be >= a_min")
    lower = q + np.sqrt(a_min / 2.0) + np.sqrt(2.0 / a_min)
    upper = q + np.sqrt(a_max / 2.0) + np.sqrt(2.0 / a_max)
    return float(lower), float(upper)


def select(
    coeffs: CoefficientField,
    reaction: Reaction,
    epsilon_ladder=EPSILON_LADDER,
    shrink: float = DEFAULT_SHRINK,
    allee_extrema: tuple[float, float] | None = None,
    dispersion: DispersionResult | None = None,
) -> SelectionReport:
    """Full selection verdict: KPP shortcut, linear criterion, nonlinear
    ladder, and closed-form bounds when the reaction family admits them.

    The linear and nonlinear certificates are mutually exclusive by the
    structure of the margin (mu2 > mu_bar); this is asserted on every run.
    """
    if dispersion is None:
        dispersion = linear_speed(coeffs)

    if allee_extrema is None and reaction.allee_a is not None:
        samples = reaction.allee_a(coeffs.grid.nodes)
        allee_extrema = (float(np.min(samples)), float(np.max(samples)))
    allee_bounds = None
    if allee_extrema is not None and allee_extrema[0] > 2.0:
        allee_bounds = speed_bounds_kpp_allee(coeffs.q * coeffs.direction_e, *allee_extrema)

    if kpp_shortcut_applies(coeffs, reaction):
        return SelectionReport(
            verdict=VERDICT_LINEAR,
            c0=dispersion.c0,
            criterion_max_linear=None,
            criterion_min_nonlinear=None,
            lower_bound_c=None,
            upper_bound_c=None,
            epsilon_used=None,
            kpp_shortcut=True,
            allee_bounds=allee_bounds,
            linear_grid=None,
            nonlinear_grid=None,
        )

    max_linear, linear_grid = linear_criterion(coeffs, reaction, dispersion)
    linear_pass = max_linear <= STRICT_TOL

    min_nonlinear = None
    nonlinear_grid = None
    epsilon_used = None
    lower_bound = None
    # positive margin is monotone in eps, so the first pass scanning from
    # the top is the largest certifiable rung; a fully failed scan leaves
    # the most favorable (smallest-eps) margin in the report
    for eps in sorted(epsilon_ladder, reverse=True):
        value, bound, grid_eps = nonlinear_criterion(coeffs, reaction, eps, dispersion)
        min_nonlinear, nonlinear_grid = value, grid_eps
        if bound is not None:
            epsilon_used, lower_bound = eps, bound
            break
    nonlinear_pass = lower_bound is not None

    if linear_pass and nonlinear_pass:
        raise AssertionError(
            "internal inconsistency: linear and nonlinear certificates both passed"
        )

    if linear_pass:
        verdict = VERDICT_LINEAR
    elif nonlinear_pass:
        verdict = VERDICT_NONLINEAR
    else:
        verdict = VERDICT_INCONCLUSIVE

    return SelectionReport(
        verdict=verdict,
        c0=dispersion.c0,
        criterion_max_linear=max_linear,
        criterion_min_nonlinear=min_nonlinear,
        lower_bound_c=lower_bound,
        upper_bound_c=allee_bounds[1] if (nonlinear_pass and allee_bounds) else None,
        epsilon_used=epsilon_used,
        kpp_shortcut=False,
        allee_bounds=allee_bounds,
        linear_grid=linear_grid,
        nonlinear_grid=nonlinear_grid,
    )


# ---------------------------------------------------------------------------
# Profile-based verification (upper/lower solutions at explicit speeds).


def _residual_and_tails(profile, c, coeffs, reaction, s_grid):
    if s_grid is None:
        s_grid = profile.default_s_grid()
    s_grid = np.asarray(s_grid, dtype=float)
    x = coeffs.grid.nodes.reshape(1, -1)
    phi = profile.value(s_grid.reshape(-1, 1), x)
    residual = evaluate_wave_operator(profile, c, coeffs, reaction, s_grid)
    mask = getattr(profile, "interface_mask", None)
    if mask is not None:
        residual = np.ma.masked_array(residual, mask=mask(s_grid.reshape(-1, 1), x))
    return phi, residual


def verify_upper_solution(profile, c: float, coeffs, reaction, s_grid=None) -> bool:
    """True iff the wave residual stays <= +1e-9 on the rectangle and the
    profile has the required tails (left -> 0, right bounded away from 0)."""
    phi, residual = _residual_and_tails(profile, c, coeffs, reaction, s_grid)
    if float(np.min(phi[0, :])) > LEFT_TAIL_LEVEL:
        raise TailNotResolved(
            f"left tail only reaches {np.min(phi[0, :]):.3g} > {LEFT_TAIL_LEVEL:g}"
        )
    if float(np.max(phi[0, :])) > LEFT_TAIL_LEVEL:
        return False
    if float(np.min(phi[-1, :])) < RIGHT_TAIL_FLOOR:
        return False
    return bool(np.max(residual) <= STRICT_TOL)


def verify_lower_solution(profile, c: float, coeffs, reaction, s_grid=None) -> bool:
    """True iff the residual stays >= -1e-9 and the profile carries the
    fast-decay tag mu = mu2(c) with limsup < 1 on the right."""
    rates = decay_rates(coeffs, c)
    mu = getattr(profile, "mu", float("nan"))
    if not np.isfinite(mu) or abs(mu - rates.mu2) > 1e-6 * rates.mu2:
        return False
    phi, residual = _residual_and_tails(profile, c, coeffs, reaction, s_grid)
    if float(np.max(phi[-1, :])) > 1.0 - 1e-3:
        return False
    if float(np.min(phi[0, :])) > LEFT_TAIL_LEVEL:
        raise TailNotResolved(
            f"left tail only reaches {np.min(phi[0, :]):.3g} > {LEFT_TAIL_LEVEL:g}"
        )
    return bool(np.min(residual) >= -STRICT_TOL)


def upper_bound_speed(profile, c2: float, coeffs, reaction, s_grid=None) -> float | None:
    """Certify c* <= c2 from an upper solution with mu2(c2) decay; returns
    c2 on success, None when the inequality fails somewhere."""
    dispersion = linear_speed(coeffs)
    if c2 <= dispersion.c0 + 1e-12:
        raise SpeedBelowLinear(f"c2 = {c2:g} does not exceed c0 = {dispersion.c0:.12g}")
    rates = decay_rates(coeffs, c2, dispersion)
    mu = getattr(profile, "mu", float("nan"))
    if not np.isfinite(mu) or abs(mu - rates.mu2) > 1e-6 * rates.mu2:
        raise ValueError("profile does not carry the mu2(c2) decay tag")
    phi, residual = _residual_and_tails(profile, c2, coeffs, reaction, s_grid)
    if float(np.max(phi)) > 1.0 + 1e-12:
        raise ValueError("upper-bound candidate must stay within (0, 1]")
    if np.max(residual) <= STRICT_TOL:
        return float(c2)
    return None


def make_sigmoid_candidate(
    coeffs: CoefficientField,
    c: float,
    which: str = SIGMOID_MU2,
    scale: float = 1.0,
) -> SigmoidProfile:
    """Sigmoid profile at the slow or fast decay rate of speed c."""
    rates = decay_rates(coeffs, c)
    if which == SIGMOID_MU2:
        return SigmoidProfile(family=SIGMOID_MU2, psi=rates.psi2, mu=rates.mu2, scale=scale)
    return SigmoidProfile(family=which, psi=rates.psi1, mu=rates.mu1, scale=scale)


# ---------------------------------------------------------------------------
# Serialization.


def report_text(report: SelectionReport) -> str:
    """Flat key = value block; tolerances printed next to the values."""
    def fmt(v):
        if v is None:
            return "none"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return f"{v:.15g}"
        return str(v)

    lines = [
        ("verdict", report.verdict),
        ("c0", report.c0),
        ("criterion_max_linear", report.criterion_max_linear),
        ("criterion_min_nonlinear", report.criterion_min_nonlinear),
        ("lower_bound_c", report.lower_bound_c),
        ("upper_bound_c", report.upper_bound_c),
        ("epsilon_used", report.epsilon_used),
        ("kpp_shortcut", report.kpp_shortcut),
        ("allee_bound_lower", report.allee_bounds[0] if report.allee_bounds else None),
        ("allee_bound_upper", report.allee_bounds[1] if report.allee_bounds else None),
        ("strict_tolerance", STRICT_TOL),
    ]
    return "".join(f"{key} = {fmt(value)}\n" for key, value in lines)


def grid_csv(grid: CriterionGrid) -> str:
    """CSV detail grid with columns u,x,G."""
    buf = io.StringIO()
    buf.write("u,x,G\n")
    for i, u in enumerate(grid.u):
        for j, x in enumerate(grid.x):
            buf.write(f"{u:.15g},{x:.15g},{grid.values[i, j]:.15g}\n")
    return buf.getvalue()


__all__ = [
    "CriterionGrid",
    "SelectionReport",
    "candidate_margin",
    "default_u_grid",
    "linear_criterion",
    "nonlinear_criterion",
    "kpp_shortcut_applies",
    "speed_bounds_kpp_allee",
    "select",
    "verify_upper_solution",
    "verify_lower_solution",
    "upper_bound_speed",
    "make_sigmoid_candidate",
    "report_text",
    "grid_csv",
    "STRICT_TOL",
    "EPSILON_LADDER",
    "VERDICT_LINEAR",
    "VERDICT_NONLINEAR",
    "VERDICT_INCONCLUSIVE",
]
