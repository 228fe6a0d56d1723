"""scikit-learn style wrapper around the maximum-likelihood fitters."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .distributions import MODELS, ModelKind, mbuw_cdf, mbuw_log_pdf, mbuw_quantile
from .estimation import OptimizerConfig, UnitData, check_unit_data, fit, fit_core
from .exceptions import DomainError
from .gof import gof_report

__all__ = ["UnitDistribution"]


class UnitDistribution(BaseEstimator):
    """Fit one unit-interval model to a single column of proportions.

    Parameters
    ----------
    kind : str
        One of ``mbuw``, ``mbur``, ``beta``, ``kumaraswamy``, ``topp-leone``,
        ``unit-lindley``.
    parametrization : {"natural", "core"}
        ``"core"`` fits MBUW in its identified parameter ``a = alpha ** beta``;
        only valid with ``kind="mbuw"``.
    max_iter, tol, restarts
        Nelder-Mead settings.

    Attributes
    ----------
    fit_result_ : FitResult
    params_ : dict
    n_features_in_ : int

    ``transform`` maps observations to model CDF values (a probability integral
    transform); ``inverse_transform`` applies the quantile function.
    """

    def __init__(self, kind="mbuw", parametrization="natural", max_iter=10_000, tol=1e-10, restarts=2):
        self.kind = kind
        self.parametrization = parametrization
        self.max_iter = max_iter
        self.tol = tol
        self.restarts = restarts

    def _config(self):
        return OptimizerConfig(max_iterations=self.max_iter, simplex_tolerance=self.tol, restarts=self.restarts)

    def fit(self, X, y=None):
        kind = ModelKind.parse(self.kind)
        if self.parametrization not in ("natural", "core"):
            raise DomainError(f"parametrization must be 'natural' or 'core', got {self.parametrization!r}")
        if self.parametrization == "core" and kind is not ModelKind.MBUW:
            raise DomainError("the core parametrization only applies to mbuw")
        data = UnitData(check_unit_data(X, name="X"))
        if self.parametrization == "core":
            self.fit_result_ = fit_core(data, self._config())
        else:
            self.fit_result_ = fit(kind, data, self._config())
        self.kind_ = kind
        self.params_ = self.fit_result_.params()
        self.n_features_in_ = 1
        return self

    # kernels bound to the fitted parameters
    def _kernels(self):
        check_is_fitted(self, "fit_result_")
        theta = self.fit_result_.estimates
        if self.fit_result_.param_names == ("a",):
            a = theta[0]
            return (lambda y: mbuw_log_pdf(a, y), lambda y: mbuw_cdf(a, y), lambda u: mbuw_quantile(a, u))
        model = MODELS[self.kind_]
        return (
            lambda y: model.log_pdf(theta, y),
            lambda y: model.cdf(theta, y),
            lambda u: model.quantile(theta, u),
        )

    @staticmethod
    def _column(X, name="X"):
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 2:
            if arr.shape[1] != 1:
                raise DomainError(f"{name} must have a single column, got shape {arr.shape}")
            return arr[:, 0], True
        if arr.ndim != 1:
            raise DomainError(f"{name} must be 1-d or a single column")
        return arr, False

    def score_samples(self, X):
        """Log-density of each observation."""
        log_pdf, _, _ = self._kernels()
        return np.asarray(log_pdf(check_unit_data(X, name="X")), dtype=float)

    def score(self, X, y=None):
        """Total log-likelihood of ``X`` under the fitted model."""
        return float(np.sum(self.score_samples(X)))

    def transform(self, X):
        _, cdf, _ = self._kernels()
        col, two_d = self._column(X)
        out = np.asarray(cdf(check_unit_data(col, name="X")), dtype=float)
        return out[:, None] if two_d else out

    def inverse_transform(self, U):
        _, _, quantile = self._kernels()
        col, two_d = self._column(U, "U")
        if np.any(~np.isfinite(col)) or np.any((col < 0.0) | (col > 1.0)):
            raise DomainError("probabilities must lie in [0, 1]")
        out = np.asarray(quantile(col), dtype=float)
        return out[:, None] if two_d else out

    def sample(self, n_samples=1, random_state=None):
        """Inverse-transform draws as an ``(n_samples, 1)`` array."""
        _, _, quantile = self._kernels()
        rng = np.random.default_rng(random_state)
        return np.asarray(quantile(rng.random(int(n_samples))), dtype=float)[:, None]

    def gof(self, X):
        """Goodness-of-fit report for ``X`` (normally the training data)."""
        check_is_fitted(self, "fit_result_")
        return gof_report(self.fit_result_, UnitData(check_unit_data(X, name="X")))
