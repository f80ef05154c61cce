"""Generalized means and their Hardy constants."""

from .errors import HardyMeansError
from .generators import Generator, GridSpec, catalog, compare_generators, custom_generator, gini_chi
from .generators import kappa, log_generator, power_generator, shape_report
from .hardy import (
    HardyEstimate, SequenceSpec, VerificationReport, gini_hardy_constant, hardy_deviation_constant,
    hardy_limit_estimate, hardy_lower_bound, hardy_power_constant, qa_hardy_analysis,
    verify_hardy_inequality,
)
from .means import (
    Deviation, Gini, HomogeneousDeviation, PowerMean, QuasiArithmetic, check_mean_properties,
    evaluate, gini_mean, power_mean, prefix_means, quasi_arithmetic_mean,
)

__version__ = "0.1.0"

__all__ = [
    "HardyMeansError",
    "Generator",
    "GridSpec",
    "catalog",
    "compare_generators",
    "custom_generator",
    "gini_chi",
    "kappa",
    "log_generator",
    "power_generator",
    "shape_report",
    "HardyEstimate",
    "SequenceSpec",
    "VerificationReport",
    "gini_hardy_constant",
    "hardy_deviation_constant",
    "hardy_limit_estimate",
    "hardy_lower_bound",
    "hardy_power_constant",
    "qa_hardy_analysis",
    "verify_hardy_inequality",
    "Deviation",
    "Gini",
    "HomogeneousDeviation",
    "PowerMean",
    "QuasiArithmetic",
    "check_mean_properties",
    "evaluate",
    "gini_mean",
    "power_mean",
    "prefix_means",
    "quasi_arithmetic_mean",
]
