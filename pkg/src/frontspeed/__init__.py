"""Spreading speeds, decay rates, and speed-selection verdicts for 1-D
periodic reaction-advection-diffusion fronts."""

__version__ = "0.1.0"

from .core import (
    CoefficientField,
    PeriodicGrid,
    Reaction,
    coefficients_from_reaction,
    make_coefficients,
    make_grid,
    make_kpp_allee,
    make_tabulated_reaction,
)
from .dispersion import (
    DecayRates,
    DispersionResult,
    convexity_diagnostic,
    decay_rates,
    linear_speed,
    stability_check,
)
from .eigen import Eigenpair, k_of_lambda, kbar_of_gamma, principal_eigenpair
from .operators import OperatorMatrix, assemble_operator, evaluate_wave_operator
from .profiles import CappedExponentialProfile, SigmoidProfile, TabulatedProfile
from .selection import (
    SelectionReport,
    linear_criterion,
    nonlinear_criterion,
    select,
    speed_bounds_kpp_allee,
    upper_bound_speed,
    verify_lower_solution,
    verify_upper_solution,
)
from .semiflow import (
    FrontMeasurement,
    RecursionSettings,
    SimulationDomain,
    Stepper,
    measure_spreading_speed,
    step,
    weinberger_recursion_speed,
)

__all__ = [
    "__version__",
    "PeriodicGrid",
    "CoefficientField",
    "Reaction",
    "make_grid",
    "make_coefficients",
    "make_kpp_allee",
    "make_tabulated_reaction",
    "coefficients_from_reaction",
    "OperatorMatrix",
    "assemble_operator",
    "evaluate_wave_operator",
    "Eigenpair",
    "principal_eigenpair",
    "k_of_lambda",
    "kbar_of_gamma",
    "DispersionResult",
    "DecayRates",
    "linear_speed",
    "decay_rates",
    "stability_check",
    "convexity_diagnostic",
    "SigmoidProfile",
    "CappedExponentialProfile",
    "TabulatedProfile",
    "SelectionReport",
    "linear_criterion",
    "nonlinear_criterion",
    "select",
    "verify_upper_solution",
    "verify_lower_solution",
    "upper_bound_speed",
    "speed_bounds_kpp_allee",
    "SimulationDomain",
    "FrontMeasurement",
    "RecursionSettings",
    "Stepper",
    "step",
    "measure_spreading_speed",
    "weinberger_recursion_speed",
]
