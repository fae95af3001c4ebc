"""Shared fixtures; the expensive simulations are session-scoped so the
acceptance suite and the semiflow tests reuse one run per case."""

import time

import numpy as np
import pytest

from frontspeed.core import make_grid, make_kpp_allee, coefficients_from_reaction
from frontspeed.semiflow import SimulationDomain, measure_spreading_speed


def hetero_allee(x):
    return 5.0 + 2.0 * np.sin(2.0 * np.pi * x) ** 2


def make_problem(a, q, direction_e=+1, n_cells=256):
    grid = make_grid(1.0, n_cells)
    reaction = make_kpp_allee(grid, a)
    coeffs = coefficients_from_reaction(grid, q, reaction, direction_e=direction_e)
    return grid, coeffs, reaction


def acceptance_domain(t_end):
    return SimulationDomain(x_min=-310.0, x_max=310.0, n_points=8192, t_end=t_end)


def _timed_measurement(a, q, t_end):
    _, coeffs, reaction = make_problem(a, q)
    start = time.perf_counter()
    m = measure_spreading_speed(acceptance_domain(t_end), coeffs, reaction, side="left")
    return m, time.perf_counter() - start


@pytest.fixture(scope="session")
def front_a8_q0():
    return _timed_measurement(8.0, 0.0, 80.0)


@pytest.fixture(scope="session")
def front_a8_q1():
    return _timed_measurement(8.0, 1.0, 80.0)


@pytest.fixture(scope="session")
def front_a1_q0():
    return _timed_measurement(1.0, 0.0, 120.0)


@pytest.fixture(scope="session")
def front_hetero():
    return _timed_measurement(hetero_allee, 0.0, 80.0)
