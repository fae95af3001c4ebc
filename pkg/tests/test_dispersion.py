"""Linear speed, decay roots, stability, convexity, and the sweep CSV."""

import numpy as np
import pytest

from frontspeed.core import (
    coefficients_from_reaction,
    make_coefficients,
    make_grid,
    make_kpp_allee,
)
from frontspeed.dispersion import (
    convexity_diagnostic,
    decay_rates,
    linear_speed,
    stability_check,
    sweep_csv,
)
from frontspeed.errors import AssumptionViolated, SpeedBelowLinear


@pytest.fixture(scope="module")
def grid():
    return make_grid(1.0, 256)


def test_linear_speed_constant(grid):
    for q in (0.0, 0.7):
        coeffs = make_coefficients(grid, q, 1.0, -2.0)
        result = linear_speed(coeffs)
        assert result.c0 == pytest.approx(q + 2.0, abs=1e-9)
        assert result.mu_bar == pytest.approx(1.0, abs=1e-7)
        assert result.k0 == pytest.approx(1.0, abs=1e-12)
        assert result.convexity_ok


def test_linear_speed_requires_positive_k0(grid):
    with pytest.raises(AssumptionViolated):
        linear_speed(make_coefficients(grid, 0.0, -0.5, -2.0))


def test_linear_speed_heterogeneous_sandwich(grid):
    # min eta = 1, max eta = 2 sandwich the speed between 2 and 2*sqrt(2)
    coeffs = make_coefficients(grid, 0.0, lambda x: 1.0 + np.sin(2 * np.pi * x) ** 2, -2.0)
    result = linear_speed(coeffs)
    assert 2.0 - 1e-9 <= result.c0 <= 2.0 * np.sqrt(2.0) + 1e-9


def test_c0_equals_k_over_mu(grid):
    from frontspeed.eigen import k_of_lambda

    coeffs = make_coefficients(grid, 0.3, lambda x: 1.0 + 0.5 * np.sin(2 * np.pi * x) ** 2, -2.0)
    result = linear_speed(coeffs)
    k_at_min = k_of_lambda(coeffs, result.mu_bar).eigenvalue
    assert result.c0 == pytest.approx(k_at_min / result.mu_bar, rel=1e-9)


def test_decay_rates_closed_form(grid):
    for q in (0.0, 1.0):
        coeffs = make_coefficients(grid, q, 1.0, -2.0)
        rates = decay_rates(coeffs, q + 2.5)
        assert rates.mu1 == pytest.approx(0.5, abs=1e-8)
        assert rates.mu2 == pytest.approx(2.0, abs=1e-8)
        assert np.min(rates.psi1) > 0 and np.min(rates.psi2) > 0


def test_decay_rates_reject_subcritical(grid):
    coeffs = make_coefficients(grid, 0.0, 1.0, -2.0)
    with pytest.raises(SpeedBelowLinear):
        decay_rates(coeffs, 2.0)
    with pytest.raises(SpeedBelowLinear):
        decay_rates(coeffs, 1.5)


def test_decay_rates_monotone_ladder(grid):
    coeffs = make_coefficients(grid, 0.0, 1.0, -2.0)
    disp = linear_speed(coeffs)
    speeds = [2.1, 2.5, 3.0]
    all_rates = [decay_rates(coeffs, c, disp) for c in speeds]
    mu1s = [r.mu1 for r in all_rates]
    mu2s = [r.mu2 for r in all_rates]
    assert mu1s[0] > mu1s[1] > mu1s[2]
    assert mu2s[0] < mu2s[1] < mu2s[2]
    for r in all_rates:
        assert 0 < r.mu1 < disp.mu_bar < r.mu2


def test_roots_collapse_at_c0(grid):
    coeffs = make_coefficients(grid, 0.0, lambda x: 1.0 + 0.5 * np.sin(2 * np.pi * x) ** 2, -2.0)
    disp = linear_speed(coeffs)
    spreads = []
    for eps in (1e-2, 1e-3, 1e-4):
        rates = decay_rates(coeffs, disp.c0 + eps, disp)
        spreads.append(rates.mu2 - rates.mu1)
        assert abs(rates.mu1 - disp.mu_bar) < 2 * np.sqrt(eps) + 1e-3
        assert abs(rates.mu2 - disp.mu_bar) < 2 * np.sqrt(eps) + 1e-3
    assert spreads[0] > spreads[1] > spreads[2]


def test_secant_identity_at_roots(grid):
    from frontspeed.eigen import k_of_lambda

    coeffs = make_coefficients(grid, 0.4, lambda x: 1.0 + 0.7 * np.sin(2 * np.pi * x) ** 2, -2.0)
    disp = linear_speed(coeffs)
    c = disp.c0 + 0.3
    rates = decay_rates(coeffs, c, disp)
    for mu in (rates.mu1, rates.mu2):
        k = k_of_lambda(coeffs, mu).eigenvalue
        assert abs(c * mu - k) <= 1e-9 * max(1.0, c * mu)


def test_stability_check(grid):
    assert stability_check(make_coefficients(grid, 0.0, 1.0, -2.0)) == pytest.approx(-2.0)
    reaction = make_kpp_allee(grid, 8.0)
    coeffs = coefficients_from_reaction(grid, 0.0, reaction)
    assert stability_check(coeffs) == pytest.approx(-9.0, abs=1e-10)
    degenerate = make_coefficients(grid, 0.0, 1.0, 0.0)
    assert stability_check(degenerate) == pytest.approx(0.0, abs=1e-12)


def test_convexity_diagnostic(grid):
    coeffs = make_coefficients(grid, 0.0, 1.0, -2.0)
    assert convexity_diagnostic(coeffs, [0.5, 1.0, 1.5, 2.0, 2.5])
    hetero = make_coefficients(grid, 0.0, lambda x: 1.0 + 2.0 * np.sin(2 * np.pi * x) ** 2, -2.0)
    assert convexity_diagnostic(hetero, np.linspace(0.25, 4.0, 16))
    with pytest.raises(ValueError):
        convexity_diagnostic(coeffs, [1.0, 2.0, 3.0])


def test_bracket_stability(grid):
    # restarting from a 2x wider bracket moves c0 by < 1e-9
    from frontspeed.dispersion import _bracket_minimum, _golden_section, _refine_minimizer
    from frontspeed.eigen import k_of_lambda

    coeffs = make_coefficients(grid, 0.0, lambda x: 1.0 + 0.5 * np.sin(2 * np.pi * x) ** 2, -2.0)
    h = lambda lam: k_of_lambda(coeffs, lam).eigenvalue / lam
    left, right = _bracket_minimum(h, 1.0)
    mu_a = _refine_minimizer(coeffs, _golden_section(h, left, right, 1e-10))
    mu_b = _refine_minimizer(coeffs, _golden_section(h, left / 2.0, right * 2.0, 1e-10))
    assert abs(h(mu_a) - h(mu_b)) < 1e-9


def test_sweep_csv_format(grid):
    coeffs = make_coefficients(grid, 0.0, 1.0, -2.0)
    result = linear_speed(coeffs)
    csv = sweep_csv(result)
    lines = csv.strip().split("\n")
    assert lines[0] == "lambda,k,k_over_lambda"
    assert len(lines) == len(result.k_samples) + 1
    lam, k, ratio = map(float, lines[1].split(","))
    assert k == pytest.approx(lam**2 + 1.0, abs=1e-10)
    assert ratio == pytest.approx(k / lam, rel=1e-14)
