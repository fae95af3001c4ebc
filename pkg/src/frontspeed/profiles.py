"""Candidate wave profiles with closed-form s-derivatives.

The sigmoid family phi(s,x) = Psi(x) / (Psi(x) + exp(-mu*s)) sweeps (0,1)
monotonically in s and satisfies phi_s = mu*phi*(1-phi) exactly, so the
comparison-test residual can be evaluated without s-truncation error.
The capped exponential min(1, exp(mu*s)*Psi) is the classical KPP upper
solution; its truncation interface is masked out of sign checks (the
minimum of two upper solutions is an upper solution, and the kink only
adds a negative distributional term).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SIGMOID_MU1 = "sigmoid_mu1"
SIGMOID_MU2 = "sigmoid_mu2"
CUSTOM = "custom"


@dataclass(frozen=True)
class SigmoidProfile:
    """phi(s,x) = scale * Psi(x) / (Psi(x) + exp(-mu*s))."""

    family: str
    psi: np.ndarray
    mu: float
    scale: float = 1.0

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError("sigmoid decay rate mu must be positive")
        if not (0.0 < self.scale <= 1.0):
            raise ValueError("scale must lie in (0, 1]")
        if np.min(self.psi) <= 0.0:
            raise ValueError("eigenfunction samples must be strictly positive")

    def _sigma(self, s, x):
        psi = self._psi_row(x)
        return psi / (psi + np.exp(-self.mu * s))

    def _psi_row(self, x):
        if np.shape(x)[-1] != self.psi.size:
            raise ValueError("x samples do not match the eigenfunction grid")
        return self.psi.reshape(1, -1)

    def value(self, s, x):
        return self.scale * self._sigma(s, x)

    def ds(self, s, x):
        sig = self._sigma(s, x)
        return self.scale * self.mu * sig * (1.0 - sig)

    def dss(self, s, x):
        sig = self._sigma(s, x)
        return self.scale * self.mu**2 * sig * (1.0 - sig) * (1.0 - 2.0 * sig)

    def default_s_grid(self, n_points: int = 401) -> np.ndarray:
        """Rectangle reaching below the 1e-6 tail level on the left."""
        psi_max = float(np.max(self.psi))
        s_min = -(16.0 + max(0.0, np.log(psi_max))) / self.mu
        s_max = 12.0 / self.mu
        return np.linspace(s_min, s_max, n_points)


@dataclass(frozen=True)
class CappedExponentialProfile:
    """U(s,x) = min(cap, exp(mu*s) * Psi(x)), the truncated KPP candidate."""

    psi: np.ndarray
    mu: float
    cap: float = 1.0
    family: str = field(default=CUSTOM)

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError("decay rate mu must be positive")
        if np.min(self.psi) <= 0.0:
            raise ValueError("eigenfunction samples must be strictly positive")

    def _raw(self, s, x):
        if np.shape(x)[-1] != self.psi.size:
            raise ValueError("x samples do not match the eigenfunction grid")
        return np.exp(self.mu * s) * self.psi.reshape(1, -1)

    def value(self, s, x):
        return np.minimum(self.cap, self._raw(s, x))

    def ds(self, s, x):
        raw = self._raw(s, x)
        return np.where(raw < self.cap, self.mu * raw, 0.0)

    def dss(self, s, x):
        raw = self._raw(s, x)
        return np.where(raw < self.cap, self.mu**2 * raw, 0.0)

    def interface_mask(self, s, x) -> np.ndarray:
        """True where the x-stencil straddles the truncation interface;
        those points carry O(1/h) one-sided kink errors and are excluded
        from sign checks."""
        capped = self._raw(s, x) >= self.cap
        near = (capped != np.roll(capped, 1, axis=1)) | (capped != np.roll(capped, -1, axis=1))
        return near | np.roll(near, 1, axis=1) | np.roll(near, -1, axis=1)

    def default_s_grid(self, n_points: int = 401) -> np.ndarray:
        psi_max = float(np.max(self.psi))
        s_min = -(16.0 + max(0.0, np.log(psi_max))) / self.mu
        s_max = 6.0 / self.mu
        return np.linspace(s_min, s_max, n_points)


@dataclass(frozen=True)
class TabulatedProfile:
    """Profile given by arrays on an (s, x) rectangle; s-derivatives must
    be supplied by the caller."""

    s_grid: np.ndarray
    values: np.ndarray
    values_ds: np.ndarray
    values_dss: np.ndarray
    family: str = CUSTOM
    mu: float = float("nan")

    def _pick(self, arr, s, x):
        if arr.shape != (np.shape(s)[0], np.shape(x)[-1]):
            raise ValueError("tabulated profile shape does not match the rectangle")
        return arr

    def value(self, s, x):
        return self._pick(self.values, s, x)

    def ds(self, s, x):
        return self._pick(self.values_ds, s, x)

    def dss(self, s, x):
        return self._pick(self.values_dss, s, x)

    def default_s_grid(self, n_points: int = 401) -> np.ndarray:
        return self.s_grid


__all__ = [
    "SigmoidProfile",
    "CappedExponentialProfile",
    "TabulatedProfile",
    "SIGMOID_MU1",
    "SIGMOID_MU2",
    "CUSTOM",
]
