"""Goodness-of-fit tests for location-scale families.

Two asymptotically distribution-free tests of H0: F(x) = F0((x - mu)/sigma)
with unknown location and scale, for normal and logistic F0:

  * a martingale-transform test (sup of a transformed empirical process,
    compared against sup-Brownian critical values), and
  * an empirical-likelihood test with a growing number of cosine moment
    constraints (compared against chi-square quantiles),

plus a Monte Carlo harness for level/power studies and a command-line
interface (`lsgof test`, `lsgof simulate`, `lsgof critical-values`).
"""
from ._kernels import backend_name
from .distributions import Distribution, Family, Sample, parse_family, sample
from .el_core import (ConstraintMatrix, DualSolution, ElOutcome, ElStatistic,
                      chi2_quantile, constraint_matrix, default_m, el_statistic,
                      el_test, phi, solve_dual)
from .errors import (BracketError, DegenerateSampleError, DomainError,
                     InfeasibleConstraintsError, LsgofError,
                     NonConvergenceError, QuadratureError,
                     SingularMatrixError, UnsupportedFamilyError)
from .estimation import LocationScaleEstimate, Residuals, mle, standardize
from .kmt_core import (GammaInverseBlocks, GammaMatrix, KMT_CRITICAL_VALUES,
                       KmtOutcome, KmtStatistic, TransformedProcess,
                       gamma_inverse, gamma_matrix, integrand, kmt_statistic,
                       kmt_test, re_function, transformed_process)
from .simulation import (CellResult, PowerTable, SimulationCell, desk_config,
                         paper_config, run_cell, run_replication, run_study)

__version__ = "0.1.0"

__all__ = [
    "Distribution", "Family", "Sample", "parse_family", "sample",
    "LocationScaleEstimate", "Residuals", "mle", "standardize",
    "GammaMatrix", "GammaInverseBlocks", "TransformedProcess",
    "KmtStatistic", "KmtOutcome", "KMT_CRITICAL_VALUES",
    "gamma_matrix", "gamma_inverse", "integrand", "re_function",
    "transformed_process", "kmt_statistic", "kmt_test",
    "ConstraintMatrix", "DualSolution", "ElStatistic", "ElOutcome",
    "phi", "constraint_matrix", "solve_dual", "default_m",
    "el_statistic", "chi2_quantile", "el_test",
    "SimulationCell", "CellResult", "PowerTable",
    "run_replication", "run_cell", "run_study",
    "paper_config", "desk_config",
    "LsgofError", "DomainError", "UnsupportedFamilyError",
    "DegenerateSampleError", "NonConvergenceError", "SingularMatrixError",
    "QuadratureError", "BracketError", "InfeasibleConstraintsError",
    "backend_name",
    "__version__",
]
