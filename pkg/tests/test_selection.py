"""Selection criteria, profile verification, bounds, and the verdict
pipeline on the Allee family."""

import numpy as np
import pytest

from frontspeed.core import (
    coefficients_from_reaction,
    make_grid,
    make_kpp_allee,
)
from frontspeed.dispersion import decay_rates, linear_speed
from frontspeed.errors import SpeedBelowLinear, TailNotResolved
from frontspeed.operators import evaluate_wave_operator
from frontspeed.profiles import (
    CappedExponentialProfile,
    SIGMOID_MU1,
    SIGMOID_MU2,
    SigmoidProfile,
)
from frontspeed.selection import (
    candidate_margin,
    default_u_grid,
    grid_csv,
    kpp_shortcut_applies,
    linear_criterion,
    make_sigmoid_candidate,
    nonlinear_criterion,
    report_text,
    select,
    speed_bounds_kpp_allee,
    upper_bound_speed,
    verify_lower_solution,
    verify_upper_solution,
)


def problem(a, q=0.0, n_cells=256):
    grid = make_grid(1.0, n_cells)
    reaction = make_kpp_allee(grid, a)
    return grid, coefficients_from_reaction(grid, q, reaction), reaction


def test_u_grid_shape():
    u = default_u_grid()
    assert u.size >= 400
    assert u[0] >= 1e-4 and u[-1] <= 1.0 - 1e-4
    assert np.all(np.diff(u) > 0)


def test_linear_criterion_constant_a_closed_form():
    # G reduces to u*(a - 2) for the constant-coefficient Allee family
    for a, sign in [(1.0, -1), (2.0, 0), (3.0, +1)]:
        _, coeffs, reaction = problem(a)
        max_value, grid_vals = linear_criterion(coeffs, reaction)
        u = grid_vals.u
        if sign < 0:
            assert max_value < 0
            assert max_value == pytest.approx(-u.min(), rel=1e-6)
        elif sign == 0:
            assert abs(max_value) <= 1e-8
        else:
            assert max_value == pytest.approx(u.max() * (a - 2), rel=1e-6)


def test_nonlinear_criterion_a8():
    _, coeffs, reaction = problem(8.0)
    value, bound, _ = nonlinear_criterion(coeffs, reaction, 0.25)
    # mu2(2.25) ~ 1.6404, margin min = u_min*(8 - 2 mu2^2) > 0
    mu2 = decay_rates(coeffs, 2.25).mu2
    assert value == pytest.approx(1e-4 * (8.0 - 2.0 * mu2**2), rel=1e-6)
    assert bound == pytest.approx(2.25, abs=1e-9)
    # boundary eps = 0.5 gives margin 0, not certified
    value_b, bound_b, _ = nonlinear_criterion(coeffs, reaction, 0.5)
    assert abs(value_b) <= 1e-8
    assert bound_b is None


def test_nonlinear_criterion_rejects_bad_epsilon():
    _, coeffs, reaction = problem(8.0)
    with pytest.raises(ValueError):
        nonlinear_criterion(coeffs, reaction, 0.0)


def test_kpp_shortcut():
    _, coeffs, reaction = problem(1.0)
    assert kpp_shortcut_applies(coeffs, reaction)
    _, coeffs15, reaction15 = problem(1.5)
    assert not kpp_shortcut_applies(coeffs15, reaction15)


def test_select_verdicts_span_the_family():
    expected = {1.0: "linear", 1.5: "linear", 2.0: "linear", 3.0: "nonlinear", 8.0: "nonlinear"}
    for a, verdict in expected.items():
        _, coeffs, reaction = problem(a)
        report = select(coeffs, reaction)
        assert report.verdict == verdict, f"a={a}"
        if verdict == "nonlinear":
            assert report.lower_bound_c > report.c0
            assert report.epsilon_used is not None


def test_select_verdict_switches_once_at_two():
    verdicts = []
    for a in (1.6, 1.8, 1.95, 2.0, 2.05, 2.2, 2.4):
        _, coeffs, reaction = problem(a)
        verdicts.append(select(coeffs, reaction).verdict == "linear")
    flips = sum(1 for i in range(len(verdicts) - 1) if verdicts[i] != verdicts[i + 1])
    assert flips == 1
    assert verdicts[3]      # a = 2.0 still linear
    assert not verdicts[4]  # a = 2.05 not linear


def test_select_mutual_exclusivity_guard():
    # every run asserts internally; just exercise both verdict branches
    for a in (1.5, 8.0):
        _, coeffs, reaction = problem(a)
        report = select(coeffs, reaction)
        linear_pass = (
            report.criterion_max_linear is not None and report.criterion_max_linear <= 1e-9
        )
        nonlinear_pass = report.lower_bound_c is not None
        assert not (linear_pass and nonlinear_pass)


def test_select_heterogeneous_allee():
    grid = make_grid(1.0, 256)
    a_fn = lambda x: 5.0 + 2.0 * np.sin(2 * np.pi * x) ** 2
    reaction = make_kpp_allee(grid, a_fn)
    coeffs = coefficients_from_reaction(grid, 0.0, reaction)
    report = select(coeffs, reaction, allee_extrema=(5.0, 7.0))
    assert report.verdict == "nonlinear"
    assert report.allee_bounds[0] == pytest.approx(np.sqrt(2.5) + np.sqrt(0.4), abs=1e-12)
    assert report.allee_bounds[1] == pytest.approx(np.sqrt(3.5) + np.sqrt(2.0 / 7.0), abs=1e-12)
    assert report.lower_bound_c > report.c0


def test_factorization_identity():
    # wave residual of a sigmoid equals phi(1-phi)/Psi * margin pointwise
    grid = make_grid(1.0, 256)
    a_fn = lambda x: 5.0 + 2.0 * np.sin(2 * np.pi * x) ** 2  # heterogeneous a, eta = 1
    for a, c in [(8.0, 2.25), (a_fn, 2.3), (2.0, 2.0 + 1e-6)]:
        reaction = make_kpp_allee(grid, a)
        coeffs = coefficients_from_reaction(grid, 0.0, reaction)
        profile = make_sigmoid_candidate(coeffs, c, SIGMOID_MU2)
        s = profile.default_s_grid()
        residual = evaluate_wave_operator(profile, c, coeffs, reaction, s)
        phi = profile.value(s.reshape(-1, 1), grid.nodes.reshape(1, -1))
        margin = candidate_margin(phi, profile.mu, profile.psi, coeffs, reaction)
        factored = phi * (1.0 - phi) / profile.psi.reshape(1, -1) * margin
        assert np.max(np.abs(residual - factored)) <= 1e-8


def test_verify_upper_solution_cases():
    # boundary case a=2: the sigmoid is the exact front at c0
    _, coeffs2, reaction2 = problem(2.0)
    disp2 = linear_speed(coeffs2)
    phi2 = SigmoidProfile(SIGMOID_MU1, disp2.psi_mu_bar, disp2.mu_bar)
    assert verify_upper_solution(phi2, disp2.c0, coeffs2, reaction2)

    # a=3 breaks the inequality
    _, coeffs3, reaction3 = problem(3.0)
    disp3 = linear_speed(coeffs3)
    phi3 = SigmoidProfile(SIGMOID_MU1, disp3.psi_mu_bar, disp3.mu_bar)
    assert not verify_upper_solution(phi3, disp3.c0, coeffs3, reaction3)

    # capped exponential is the classical KPP upper solution
    _, coeffs1, reaction1 = problem(1.0)
    disp1 = linear_speed(coeffs1)
    capped = CappedExponentialProfile(disp1.psi_mu_bar, disp1.mu_bar)
    assert verify_upper_solution(capped, disp1.c0, coeffs1, reaction1)


def test_verify_upper_solution_tail_not_resolved():
    _, coeffs, reaction = problem(2.0)
    disp = linear_speed(coeffs)
    profile = SigmoidProfile(SIGMOID_MU1, disp.psi_mu_bar, disp.mu_bar)
    with pytest.raises(TailNotResolved):
        verify_upper_solution(profile, disp.c0, coeffs, reaction, s_grid=np.linspace(-2, 5, 50))


def test_verify_lower_solution_cases():
    _, coeffs8, reaction8 = problem(8.0)
    shrunk = make_sigmoid_candidate(coeffs8, 2.25, SIGMOID_MU2, scale=0.99)
    assert verify_lower_solution(shrunk, 2.25, coeffs8, reaction8)

    _, coeffs1, reaction1 = problem(1.0)
    bad = make_sigmoid_candidate(coeffs1, 2.25, SIGMOID_MU2, scale=0.99)
    assert not verify_lower_solution(bad, 2.25, coeffs1, reaction1)


def test_verify_lower_solution_decay_condition():
    # profile without the fast-decay tag is rejected with False
    _, coeffs, reaction = problem(8.0)
    slow = make_sigmoid_candidate(coeffs, 2.25, SIGMOID_MU1, scale=0.99)
    assert not verify_lower_solution(slow, 2.25, coeffs, reaction)


def test_upper_bound_speed():
    _, coeffs, reaction = problem(8.0)
    good = make_sigmoid_candidate(coeffs, 2.6, SIGMOID_MU2)
    assert upper_bound_speed(good, 2.6, coeffs, reaction) == pytest.approx(2.6)
    # true minimal speed is 2.5: the 2.4 candidate must fail
    bad = make_sigmoid_candidate(coeffs, 2.4, SIGMOID_MU2)
    assert upper_bound_speed(bad, 2.4, coeffs, reaction) is None
    with pytest.raises(SpeedBelowLinear):
        upper_bound_speed(good, 1.9, coeffs, reaction)


def test_speed_bounds_kpp_allee_values():
    lower, upper = speed_bounds_kpp_allee(0.0, 8.0, 8.0)
    assert lower == pytest.approx(2.5, abs=1e-12)
    assert upper == pytest.approx(2.5, abs=1e-12)
    lower, upper = speed_bounds_kpp_allee(1.0, 3.0, 7.0)
    assert lower == pytest.approx(1.0 + np.sqrt(1.5) + np.sqrt(2.0 / 3.0), abs=1e-12)
    assert upper == pytest.approx(1.0 + np.sqrt(3.5) + np.sqrt(2.0 / 7.0), abs=1e-12)
    with pytest.raises(ValueError):
        speed_bounds_kpp_allee(0.0, 2.0, 8.0)


def test_report_text_and_grid_csv():
    _, coeffs, reaction = problem(8.0)
    report = select(coeffs, reaction)
    text = report_text(report)
    assert "verdict = nonlinear" in text
    assert "epsilon_used = 0.2" in text
    csv = grid_csv(report.nonlinear_grid)
    header, first = csv.split("\n", 2)[:2]
    assert header == "u,x,G"
    assert len(first.split(",")) == 3
