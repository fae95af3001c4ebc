"""Discrete cell operators and the wave-profile residual.

The cell operator acting on L-periodic functions,

    A psi = psi'' + (2*lambda*e + q) psi' + (lambda^2 + lambda*q*e + eta) psi,

is discretized with second-order central differences on the periodic
grid.  First-order terms are deliberately not upwinded: under the mesh
condition spacing <= 2/max|2*lambda*e + q| the off-diagonals stay
nonnegative and the matrix keeps the Perron structure the eigensolver
relies on.  Assembly records whether that condition holds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CoefficientField, Reaction


def periodic_d1(values: np.ndarray, spacing: float, axis: int = -1) -> np.ndarray:
    """Second-order central first derivative with periodic wrap."""
    return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * spacing)


def periodic_d2(values: np.ndarray, spacing: float, axis: int = -1) -> np.ndarray:
    """Second-order central second derivative with periodic wrap."""
    return (
        np.roll(values, -1, axis=axis) - 2.0 * values + np.roll(values, 1, axis=axis)
    ) / (spacing * spacing)


@dataclass(frozen=True)
class OperatorMatrix:
    """Cyclic tridiagonal matrix stored by stencil component.

    Row i couples node i to i-1 and i+1 (mod n) only; the banded rows are
    exposed as lower/diag/upper properties.  matvec groups the second
    difference before scaling by 1/h^2: the naive row form cancels
    -2/h^2 against the off-diagonals and leaves an eps/h^2 noise floor on
    eigenvalues, which the dispersion refinement cannot tolerate.
    mesh_ok records the nonnegative-off-diagonal condition.
    """

    drift: np.ndarray      # coefficient of the first derivative, 2*lambda*e + q
    zero: np.ndarray       # zero-order coefficient, lambda^2 + lambda*q*e + eta
    lam: float
    spacing: float
    mesh_ok: bool

    @property
    def n(self) -> int:
        return self.zero.size

    @property
    def lower(self) -> np.ndarray:
        return 1.0 / self.spacing**2 - self.drift / (2.0 * self.spacing)

    @property
    def diag(self) -> np.ndarray:
        return -2.0 / self.spacing**2 + self.zero

    @property
    def upper(self) -> np.ndarray:
        return 1.0 / self.spacing**2 + self.drift / (2.0 * self.spacing)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        left = np.roll(v, 1)
        right = np.roll(v, -1)
        second = ((left - v) + (right - v)) / self.spacing**2
        first = (right - left) / (2.0 * self.spacing)
        return second + self.drift * first + self.zero * v

    def to_dense(self) -> np.ndarray:
        n = self.n
        dense = np.zeros((n, n))
        idx = np.arange(n)
        dense[idx, idx] = self.diag
        dense[idx, (idx - 1) % n] = self.lower
        dense[idx, (idx + 1) % n] = self.upper
        return dense


def assemble_operator(coeffs: CoefficientField, lam: float, zero_order=None) -> OperatorMatrix:
    """Discretize the cell operator at parameter `lam`.

    zero_order overrides the eta samples in the zero-order coefficient
    (used for the stability operator built from zeta).
    """
    if not np.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam}")
    grid = coeffs.grid
    h = grid.spacing
    eta = coeffs.eta if zero_order is None else np.asarray(zero_order, dtype=float)
    drift = 2.0 * lam * coeffs.direction_e + coeffs.advection_q
    zero = lam * lam + lam * coeffs.advection_q * coeffs.direction_e + eta
    mesh_ok = bool(h * np.max(np.abs(drift)) <= 2.0)
    return OperatorMatrix(
        drift=drift, zero=zero, lam=float(lam), spacing=h, mesh_ok=mesh_ok
    )


def evaluate_wave_operator(
    profile,
    c: float,
    coeffs: CoefficientField,
    reaction: Reaction,
    s_grid: np.ndarray,
) -> np.ndarray:
    """Residual of the wave-profile equation on an (s, x) rectangle.

    For phi(s, x) moving at speed c the residual is

        R = phi_ss + phi_xx + 2 e phi_sx + q phi_x + (q e - c) phi_s
            + f(x, phi),

    with s-derivatives supplied analytically by the profile and
    x-derivatives taken by periodic central differences.  A traveling
    front makes R vanish; an upper solution keeps R <= 0, a lower
    solution R >= 0.

    Returns R with shape (len(s_grid), n_cells).
    """
    grid = coeffs.grid
    s = np.asarray(s_grid, dtype=float).reshape(-1, 1)
    x = grid.nodes.reshape(1, -1)

    phi = profile.value(s, x)
    phi_s = profile.ds(s, x)
    phi_ss = profile.dss(s, x)

    h = grid.spacing
    phi_x = periodic_d1(phi, h, axis=1)
    phi_xx = periodic_d2(phi, h, axis=1)
    phi_sx = periodic_d1(phi_s, h, axis=1)

    e = coeffs.direction_e
    q = coeffs.advection_q.reshape(1, -1)
    residual = (
        phi_ss
        + phi_xx
        + 2.0 * e * phi_sx
        + q * phi_x
        + (q * e - c) * phi_s
        + reaction.evaluate(np.broadcast_to(x, phi.shape), phi)
    )
    return residual


__all__ = [
    "OperatorMatrix",
    "assemble_operator",
    "evaluate_wave_operator",
    "periodic_d1",
    "periodic_d2",
]
