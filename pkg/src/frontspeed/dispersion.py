"""Linear spreading speed, critical decay, and per-speed decay rates.

The linear speed is c0 = min_{lambda>0} k(lambda)/lambda, attained at a
unique critical decay mu_bar because k is convex with k(0) > 0.  For
c > c0 the secant equation c*lambda = k(lambda) has exactly two roots
mu1(c) < mu_bar < mu2(c); mu1 decreases and mu2 increases in c.  Both
searches use only k-values (golden section / bisection): k comes from an
iterative eigensolve, so derivative-based methods would chase noise.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import CoefficientField
from .eigen import Eigenpair, k_of_lambda, kbar_of_gamma
from .errors import AssumptionViolated, BracketNotFound, SpeedBelowLinear

LAMBDA_WINDOW = (1e-8, 1e6)
GOLDEN_TOL = 1e-10
BISECT_TOL = 1e-11
K0_POSITIVE_TOL = 1e-10
K0_WARN_BAND = 1e-6
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DispersionResult:
    """Linear speed c0 = k(mu_bar)/mu_bar plus diagnostics."""

    c0: float
    mu_bar: float
    k_samples: tuple[tuple[float, float], ...]
    k0: float
    kbar0: float
    convexity_ok: bool
    direction_e: int
    psi_mu_bar: np.ndarray
    weak_growth_warning: bool = False


@dataclass(frozen=True)
class DecayRates:
    """The two decay rates at a supercritical speed c > c0."""

    c: float
    mu1: float
    mu2: float
    psi1: np.ndarray
    psi2: np.ndarray


def _k(coeffs: CoefficientField, lam: float) -> float:
    return k_of_lambda(coeffs, lam).eigenvalue


def _golden_section(f, a: float, b: float, tol: float) -> float:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _bracket_minimum(f, start: float) -> tuple[float, float]:
    """Expand geometrically from `start` until f rises on both flanks."""
    lo, hi = LAMBDA_WINDOW
    center = start
    f_center = f(center)
    left, right = center / 2.0, center * 2.0
    f_left, f_right = f(left), f(right)
    while True:
        if f_left >= f_center and f_right >= f_center:
            return left, right
        if f_left < f_center:
            right, f_right = center, f_center
            center, f_center = left, f_left
            left = center / 2.0
            if left < lo:
                raise BracketNotFound(
                    f"k(lambda)/lambda keeps decreasing down to lambda={lo:g}"
                )
            f_left = f(left)
        else:
            left, f_left = center, f_center
            center, f_center = right, f_right
            right = center * 2.0
            if right > hi:
                raise BracketNotFound(
                    f"k(lambda)/lambda keeps decreasing up to lambda={hi:g}"
                )
            f_right = f(right)


def _refine_minimizer(coeffs: CoefficientField, mu0: float) -> float:
    """Newton polish of the k/lambda minimizer via lambda*k' - k = 0.

    Golden section alone locates the minimizer only to sqrt(eigensolver
    noise) because the objective is flat there; wide-step (1e-3) central
    quotients keep the derivative noise near 1e-9 and recover ~1e-9
    accuracy on mu_bar.  Falls back to mu0 if the polish does not improve
    the objective.
    """
    d = 1e-3 * max(1.0, mu0)
    lam = mu0
    for _ in range(8):
        k_minus, k_mid, k_plus = (_k(coeffs, lam - d), _k(coeffs, lam), _k(coeffs, lam + d))
        slope = (k_plus - k_minus) / (2.0 * d)
        curv = (k_plus - 2.0 * k_mid + k_minus) / (d * d)
        objective = lam * slope - k_mid
        gradient = lam * curv
        if gradient <= 0.0:
            return mu0
        step = objective / gradient
        if abs(step) > 0.5 * lam:
            return mu0
        lam -= step
        if lam <= d:
            return mu0
        if abs(step) <= 1e-12 * max(1.0, lam):
            break
    if _k(coeffs, lam) / lam <= _k(coeffs, mu0) / mu0 + 1e-11:
        return lam
    return mu0


def linear_speed(coeffs: CoefficientField, sweep_points: int = 61) -> DispersionResult:
    """Minimize k(lambda)/lambda by golden section plus a Newton polish.

    Aborts with AssumptionViolated when k(0) <= 0: the critical decay is
    then no longer characterized by the interior minimum.
    """
    k0_pair = k_of_lambda(coeffs, 0.0)
    k0 = k0_pair.eigenvalue
    if k0 <= K0_POSITIVE_TOL:
        raise AssumptionViolated(f"k(0) = {k0:.6g} <= {K0_POSITIVE_TOL:g}")

    h = lambda lam: _k(coeffs, lam) / lam
    left, right = _bracket_minimum(h, 1.0)
    mu_bar = _golden_section(h, left, right, GOLDEN_TOL)
    mu_bar = _refine_minimizer(coeffs, mu_bar)
    pair = k_of_lambda(coeffs, mu_bar)
    c0 = pair.eigenvalue / mu_bar

    kbar0 = kbar_of_gamma(coeffs, 0.0).eigenvalue

    sweep = np.linspace(mu_bar / 4.0, 4.0 * mu_bar, sweep_points)
    k_samples = tuple((float(lam), _k(coeffs, lam)) for lam in sweep)
    convexity_ok = convexity_diagnostic(coeffs, sweep)

    return DispersionResult(
        c0=float(c0),
        mu_bar=float(mu_bar),
        k_samples=k_samples,
        k0=float(k0),
        kbar0=float(kbar0),
        convexity_ok=convexity_ok,
        direction_e=coeffs.direction_e,
        psi_mu_bar=pair.eigenfunction,
        weak_growth_warning=bool(k0 < K0_WARN_BAND),
    )


def _bisect_root(g, lo: float, hi: float, tol: float) -> float:
    g_lo = g(lo)
    while (hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def decay_rates(
    coeffs: CoefficientField,
    c: float,
    dispersion: DispersionResult | None = None,
) -> DecayRates:
    """Solve c*lambda = k(lambda) for the slow and fast rates mu1 < mu2."""
    if dispersion is None:
        dispersion = linear_speed(coeffs)
    if c <= dispersion.c0 + 1e-12:
        raise SpeedBelowLinear(f"c = {c:g} does not exceed c0 = {dispersion.c0:.12g}")

    g = lambda lam: _k(coeffs, lam) - c * lam
    mu_bar = dispersion.mu_bar
    # g > 0 at the window floor (g -> k(0) > 0), g < 0 at mu_bar
    mu1 = _bisect_root(g, LAMBDA_WINDOW[0], mu_bar, BISECT_TOL)

    hi = 2.0 * mu_bar
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > LAMBDA_WINDOW[1]:
            raise BracketNotFound(f"no fast decay root below lambda={LAMBDA_WINDOW[1]:g}")
    mu2 = _bisect_root(g, mu_bar, hi, BISECT_TOL)

    return DecayRates(
        c=float(c),
        mu1=float(mu1),
        mu2=float(mu2),
        psi1=k_of_lambda(coeffs, mu1).eigenfunction,
        psi2=k_of_lambda(coeffs, mu2).eigenfunction,
    )


def stability_check(coeffs: CoefficientField) -> float:
    """kbar(0), the growth rate of the linearization at u = 1.

    Negative means the settled state is exponentially stable; zero or
    positive is reported as degenerate/unstable by callers, never
    auto-resolved.
    """
    return kbar_of_gamma(coeffs, 0.0).eigenvalue


def convexity_diagnostic(coeffs: CoefficientField, lambda_grid) -> bool:
    """Check k's discrete convexity via second divided differences.

    Convexity of k is a theorem; a failure here indicates a solver bug,
    not a property of the problem.
    """
    lams = np.asarray(sorted(float(l) for l in lambda_grid))
    if lams.size < 5:
        raise ValueError("convexity diagnostic needs at least 5 grid points")
    # drop near-duplicate nodes: divided differences over gaps comparable
    # to the eigensolver tolerance only amplify noise
    keep = np.append(True, np.diff(lams) > 1e-6 * np.maximum(1.0, lams[1:]))
    lams = lams[keep]
    ks = np.array([_k(coeffs, lam) for lam in lams])
    for i in range(1, lams.size - 1):
        left = (ks[i] - ks[i - 1]) / (lams[i] - lams[i - 1])
        right = (ks[i + 1] - ks[i]) / (lams[i + 1] - lams[i])
        if (right - left) / (0.5 * (lams[i + 1] - lams[i - 1])) < -1e-8:
            return False
    return True


def sweep_csv(result: DispersionResult) -> str:
    """CSV of the k(lambda) sweep: columns lambda,k,k_over_lambda."""
    buf = io.StringIO()
    buf.write("lambda,k,k_over_lambda\n")
    for lam, k in result.k_samples:
        buf.write(f"{lam:.15g},{k:.15g},{k / lam:.15g}\n")
    return buf.getvalue()


__all__ = [
    "DispersionResult",
    "DecayRates",
    "linear_speed",
    "decay_rates",
    "stability_check",
    "convexity_diagnostic",
    "sweep_csv",
    "LAMBDA_WINDOW",
]
