"""Kolmogorov-Smirnov test and information criteria for fitted models.

Two labelled variants exist only to line up with published comparison tables:

* ``hqic_paper`` is ``2 log(log(n (k + 2L)))``, recovered by matching the
  tabulated Hannan-Quinn values; ``hqic_standard`` is the textbook
  ``2L + 2k log(log n)``.
* ``ks_stat_upper`` is ``max_i (i/n - F(y_(i)))``, the one-sided distance the
  tables list as "K-S Value". The p-value always uses the two-sided ``D``.

``L`` is the magnitude of the maximised log-likelihood, matching tables that
print ``-L`` as "NLL" and build AIC as ``2k + 2L``. The K-S p-value ignores the
effect of estimating parameters from the same data (no Lilliefors correction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .distributions import MODELS
from .estimation import FitResult, UnitData, _as_data
from .exceptions import DomainError
from .special import kolmogorov_cdf

__all__ = [
    "GofReport",
    "InfoCriteria",
    "KsResult",
    "ks_statistic",
    "ks_statistic_upper",
    "ks_test",
    "info_criteria",
    "gof_report",
]


def _sorted_cdf(data, cdf):
    y = np.sort(np.asarray(_as_data(data).values), kind="stable")
    u = np.asarray(cdf(y), dtype=float)
    return u, y.size


def ks_statistic(data, cdf: Callable) -> float:
    """Two-sided ``D = sup |F_n - F|`` over the sorted sample."""
    u, n = _sorted_cdf(data, cdf)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def ks_statistic_upper(data, cdf: Callable) -> float:
    """One-sided ``D+ = max_i (i/n - F(y_(i)))``."""
    u, n = _sorted_cdf(data, cdf)
    i = np.arange(1, n + 1)
    return float(np.max(i / n - u))


class KsResult(NamedTuple):
    statistic: float
    pvalue: float
    reject_at_05: bool


def ks_test(data, cdf: Callable) -> KsResult:
    data = _as_data(data)
    d = ks_statistic(data, cdf)
    p = 1.0 - kolmogorov_cdf(data.n, d)
    return KsResult(d, p, p < 0.05)


class InfoCriteria(NamedTuple):
    aic: float
    aicc: float
    bic: float
    hqic_standard: float
    hqic_paper: float


def info_criteria(ll_magnitude: float, n: int, k: int) -> InfoCriteria:
    """AIC, AICc, BIC and both HQIC variants from ``L = |log-likelihood|``.

    AICc uses the standard ``2k(k+1)/(n-k-1)`` correction.
    """
    if n <= k + 1:
        raise DomainError(f"need n > k + 1 for AICc, got n={n}, k={k}")
    big_l = float(ll_magnitude)
    aic = 2.0 * k + 2.0 * big_l
    inner = n * (k + 2.0 * big_l)
    hqic_paper = 2.0 * math.log(math.log(inner)) if inner > 1.0 else math.nan
    return InfoCriteria(
        aic=aic,
        aicc=aic + 2.0 * k * (k + 1) / (n - k - 1),
        bic=2.0 * big_l + k * math.log(n),
        hqic_standard=2.0 * big_l + 2.0 * k * math.log(math.log(n)),
        hqic_paper=hqic_paper,
    )


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_stat_upper: float
    ks_pvalue: float
    reject_at_05: bool
    aic: float
    aicc: float
    bic: float
    hqic_standard: float
    hqic_paper: float
    n: int
    k: int
    ll_magnitude: float
    loglik: float
    warnings: tuple[str, ...] = ()


def gof_report(fit: FitResult, data) -> GofReport:
    data: UnitData = _as_data(data)
    model = MODELS[fit.kind]
    if fit.param_names == ("a",):
        # one-parameter core fit, i.e. MBUW with alpha = a and beta = 1
        theta = (fit.estimates[0], 1.0)
    else:
        theta = model.check(fit.estimates)

    def cdf(y):
        return model.cdf(theta, y)

    d, p, reject = ks_test(data, cdf)
    ic = info_criteria(fit.ll_magnitude, data.n, fit.k)
    warnings = []
    if not fit.converged:
        warnings.append("optimizer did not converge; criteria describe the last iterate")
    if fit.se is None:
        warnings.append(
            f"Hessian not invertible (condition {fit.hessian_condition:.3g}); standard errors unavailable"
        )
    return GofReport(
        ks_stat=d,
        ks_stat_upper=ks_statistic_upper(data, cdf),
        ks_pvalue=p,
        reject_at_05=bool(reject),
        aic=ic.aic,
        aicc=ic.aicc,
        bic=ic.bic,
        hqic_standard=ic.hqic_standard,
        hqic_paper=ic.hqic_paper,
        n=data.n,
        k=fit.k,
        ll_magnitude=fit.ll_magnitude,
        loglik=fit.loglik,
        warnings=tuple(warnings),
    )
