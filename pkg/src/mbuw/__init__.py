"""Median-based unit Weibull (MBUW) distribution toolkit.

Kernels, maximum-likelihood fitting, goodness-of-fit reporting and a
scikit-learn style estimator for models on the open unit interval.
"""

from .datasets import DATASET_IDS, NamedDataset, builtin, load
from .distributions import (
    MODELS,
    CoreParam,
    ModelKind,
    MomentSummary,
    ShapeParams,
    competitor_cdf,
    competitor_log_pdf,
    competitor_pdf,
    competitor_quantile,
    core,
    hazard,
    incomplete_moment,
    mbuw_cdf,
    mbuw_log_pdf,
    mbuw_pdf,
    mbuw_quantile,
    moment_summary,
    raw_moment,
    reversed_hazard,
    sample,
    sample_median_of_three,
    survival,
    variance_closed_form,
)
from .estimation import FitResult, OptimizerConfig, UnitData, fit, fit_core, nll
from .exceptions import DataError, DomainError, HazardOverflowError, QuadratureError
from .gof import GofReport, gof_report, info_criteria, ks_statistic, ks_statistic_upper, ks_test
from .special import integrate, kolmogorov_cdf, log_beta, log_gamma, regularized_incomplete_beta

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")] + ["UnitDistribution"]


def __getattr__(name):
    # scikit-learn is only imported when the estimator is asked for
    if name == "UnitDistribution":
        from .estimators import UnitDistribution

        return UnitDistribution
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
