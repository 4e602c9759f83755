"""Fractional Cable equation: theta-method convolution quadratures, finite elements, and diagnostics."""

from .exceptions import (
    BudgetExceededError,
    DomainError,
    IllConditionedWarning,
    NotPositiveDefiniteError,
    ParameterError,
    PositivityViolation,
    SeriesTruncationError,
    SolverError,
)
from .fem import FemSpace, Mesh, l2_norm_error, ritz_project
from .harness import ConvergenceReport, SweepEntry, check_report, observed_order, run_table, sweep
from .problems import BenchmarkCase, make_problem
from .solver import CableProblem, CorrectionSets, SchemeConfig, SolveResult, run
from .specfun import MLSeriesParams, gamma_fn, mittag_leffler_neg
from .spectral import H_of, szego_epsilon0, symbol_closed_form, toeplitz_min_eigen
from .weights import Family, ThetaScheme, WeightTable, fbn_weights, fbt_weights, starting_weights

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "DomainError",
    "IllConditionedWarning",
    "NotPositiveDefiniteError",
    "ParameterError",
    "PositivityViolation",
    "SeriesTruncationError",
    "SolverError",
    "FemSpace",
    "Mesh",
    "l2_norm_error",
    "ritz_project",
    "ConvergenceReport",
    "SweepEntry",
    "check_report",
    "observed_order",
    "run_table",
    "sweep",
    "BenchmarkCase",
    "make_problem",
    "CableProblem",
    "CorrectionSets",
    "SchemeConfig",
    "SolveResult",
    "run",
    "MLSeriesParams",
    "gamma_fn",
    "mittag_leffler_neg",
    "H_of",
    "szego_epsilon0",
    "symbol_closed_form",
    "toeplitz_min_eigen",
    "Family",
    "ThetaScheme",
    "WeightTable",
    "fbn_weights",
    "fbt_weights",
    "starting_weights",
]
