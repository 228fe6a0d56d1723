"""Maximum-likelihood fitting of the unit models.

Optimisation runs in log-parameter space (so positivity holds by construction)
with a plain Nelder-Mead simplex; the covariance comes from a central-difference
Hessian of the negative log-likelihood in natural parameter space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .distributions import MODELS, ModelKind, mbuw_log_pdf
from .exceptions import DataError, DomainError
from .special import log_beta

__all__ = [
    "UnitData",
    "OptimizerConfig",
    "FitResult",
    "NelderMeadResult",
    "check_unit_data",
    "nll",
    "init_params",
    "nelder_mead",
    "numeric_hessian",
    "fit",
    "fit_core",
    "Z_95",
    "CONDITION_CUTOFF",
]

Z_95 = 1.959964
CONDITION_CUTOFF = 1e12


def check_unit_data(values, *, name: str = "data") -> np.ndarray:
    """Validate observations and return them as a 1-d float array.

    Accepts a 1-d sequence or a single-column 2-d array (the sklearn ``X``
    layout). Every value must be finite and strictly inside (0, 1).
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DataError(f"{name} must have a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise DataError(f"{name} must be 1-d, got shape {arr.shape}")
    if arr.size == 0:
        raise DataError(f"{name} is empty")
    bad = ~((arr > 0.0) & (arr < 1.0))
    if np.any(bad):
        first = arr[np.argmax(bad)]
        raise DataError(f"{name} value {first!r} is outside the open interval (0, 1)")
    return arr


@dataclass(frozen=True, eq=False)
class UnitData:
    """Observations strictly inside (0, 1), kept in their original order."""

    values: np.ndarray

    def __post_init__(self):
        arr = check_unit_data(self.values).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, UnitData) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def _as_data(data) -> UnitData:
    return data if isinstance(data, UnitData) else UnitData(data)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 10_000
    simplex_tolerance: float = 1e-10
    restarts: int = 2
    initial_step: float = 0.1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if not self.simplex_tolerance > 0.0:
            raise DomainError("simplex_tolerance must be positive")
        if self.restarts < 0:
            raise DomainError("restarts must be non-negative")
        if not self.initial_step > 0.0:
            raise DomainError("initial_step must be positive")


@dataclass(frozen=True)
class FitResult:
    """A fitted model.

    ``loglik`` is the maximised log-likelihood and ``nll == -loglik``. The
    covariance-derived fields (``vcov``, ``se``, ``ci95``, ``se_per_obs``) are
    ``None`` when the Hessian is too ill-conditioned to invert, e.g. along the
    ``alpha ** beta`` ridge of the two-parameter MBUW likelihood.

    ``se_per_obs`` is ``sqrt(diag(vcov) / n)``, the convention behind the
    published standard-error rows and confidence intervals for these datasets;
    ``se`` is the usual ``sqrt(diag(vcov))``.
    """

    kind: ModelKind
    param_names: tuple[str, ...]
    estimates: tuple[float, ...]
    loglik: float
    n: int
    converged: bool
    iterations: int
    hessian: np.ndarray = field(repr=False)
    hessian_condition: float
    vcov: np.ndarray | None = field(default=None, repr=False)
    se: tuple[float, ...] | None = None
    ci95: tuple[tuple[float, float], ...] | None = None
    se_per_obs: tuple[float, ...] | None = None

    @property
    def nll(self) -> float:
        return -self.loglik

    @property
    def ll_magnitude(self) -> float:
        return abs(self.loglik)

    @property
    def k(self) -> int:
        return len(self.estimates)

    @property
    def se_available(self) -> bool:
        return self.se is not None

    def params(self) -> dict[str, float]:
        return dict(zip(self.param_names, self.estimates))


def _log_density(kind: ModelKind, theta, y: np.ndarray) -> np.ndarray:
    model = MODELS[kind]
    return model.log_pdf(model.check(theta), y)


def nll(kind, theta, data) -> float:
    """Negative log-likelihood ``-sum(log f(y_i; theta))``.

    Raises :class:`DomainError` for invalid parameters; a non-finite sum
    (overflow) comes back as ``+inf`` so a simplex can back away from it.
    """
    kind = ModelKind.parse(kind)
    data = _as_data(data)
    with np.errstate(all="ignore"):
        total = -float(np.sum(_log_density(kind, theta, data.values)))
    return total if math.isfinite(total) else math.inf


def _safe_nll(kind: ModelKind, data: UnitData) -> Callable[[np.ndarray], float]:
    def objective(theta):
        try:
            return nll(kind, theta, data)
        except DomainError:
            return math.inf

    return objective


def _mbuw_core_from_mean(mean: float) -> float:
    # invert mean = 6 / ((2 + a)(3 + a))
    return 0.5 * (-5.0 + math.sqrt(1.0 + 24.0 / mean))


def _bisect_log(fn: Callable[[float], float], target: float, lo=1e-8, hi=1e8) -> float:
    """Solve monotone ``fn(theta) = target`` by bisection on ``log(theta)``."""
    f_lo, f_hi = fn(lo), fn(hi)
    increasing = f_hi > f_lo
    if (target <= min(f_lo, f_hi)) or (target >= max(f_lo, f_hi)):
        return lo if (target <= f_lo) == increasing else hi
    a, b = math.log(lo), math.log(hi)
    for _ in range(200):
        mid = 0.5 * (a + b)
        if (fn(math.exp(mid)) < target) == increasing:
            a = mid
        else:
            b = mid
        if b - a < 1e-12:
            break
    return math.exp(0.5 * (a + b))


def init_params(kind, data) -> np.ndarray:
    """Moment-based starting point for the optimiser.

    MBUW/MBUR invert the closed-form mean for ``a``; Beta uses the method of
    moments; Kumaraswamy starts at (1, 1); Topp-Leone and unit-Lindley match
    the mean by bisection. Degenerate data still gives a finite start.
    """
    kind = ModelKind.parse(kind)
    y = _as_data(data).values
    mean = float(np.mean(y))

    if kind in (ModelKind.MBUW, ModelKind.MBUR):
        a0 = _mbuw_core_from_mean(mean)
        return np.array([a0, 1.0]) if kind is ModelKind.MBUW else np.array([math.sqrt(a0)])
    if kind is ModelKind.BETA:
        var = float(np.var(y, ddof=1)) if y.size > 1 else 0.0
        common = mean * (1.0 - mean) / var - 1.0 if var > 0.0 else 0.0
        if common > 0.0:
            return np.array([mean * common, (1.0 - mean) * common])
        return np.array([1.0, 1.0])
    if kind is ModelKind.KUMARASWAMY:
        return np.array([1.0, 1.0])
    if kind is ModelKind.TOPP_LEONE:
        # E[y] = 1 - B(1/2, theta + 1) / 2, increasing in theta
        return np.array([_bisect_log(lambda t: 1.0 - 0.5 * math.exp(log_beta(0.5, t + 1.0)), mean)])
    if kind is ModelKind.UNIT_LINDLEY:
        # E[y] = 1 / (1 + theta), decreasing in theta
        return np.array([_bisect_log(lambda t: 1.0 / (1.0 + t), mean)])
    raise DomainError(f"no initialiser for {kind}")  # pragma: no cover


class NelderMeadResult(NamedTuple):
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int


def _simplex_search(objective, x0, cfg: OptimizerConfig, budget: int):
    dim = x0.size
    simplex = np.vstack([x0] + [x0 + cfg.initial_step * np.eye(dim)[i] for i in range(dim)])
    values = np.array([objective(p) for p in simplex])
    iterations = 0
    while True:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        if values[-1] - values[0] < cfg.simplex_tolerance:
            return simplex[0], values[0], True, iterations
        if iterations >= budget:
            return simplex[0], values[0], False, iterations
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        f_r = objective(reflected)
        if values[0] <= f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
            continue
        if f_r < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_e = objective(expanded)
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
            continue
        if f_r < values[-1]:
            contracted = centroid + 0.5 * (reflected - centroid)
            f_c = objective(contracted)
            if f_c <= f_r:
                simplex[-1], values[-1] = contracted, f_c
                continue
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_c = objective(contracted)
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
                continue
        # shrink towards the best vertex
        simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
        values[1:] = [objective(p) for p in simplex[1:]]


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    cfg: OptimizerConfig | None = None,
) -> NelderMeadResult:
    """Minimise ``objective`` with the Nelder-Mead simplex.

    Coefficients are the standard 1 (reflection), 2 (expansion), 0.5
    (contraction) and 0.5 (shrink). A run stops once the spread of function
    values over the simplex drops below ``cfg.simplex_tolerance``; it is then
    restarted from the incumbent ``cfg.restarts`` times and the best point is
    kept. NaN objective values count as ``+inf``.
    """
    cfg = cfg or OptimizerConfig()

    def f(x):
        value = float(objective(np.asarray(x, dtype=float)))
        return math.inf if math.isnan(value) else value

    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if not math.isfinite(f(x)):
        raise DomainError("objective is not finite at the starting point")

    used = 0
    best_x, best_f, converged = x, f(x), False
    for _ in range(cfg.restarts + 1):
        budget = cfg.max_iterations - used
        if budget <= 0:
            converged = False
            break
        x_new, f_new, converged, iterations = _simplex_search(f, best_x, cfg, budget)
        used += iterations
        if f_new <= best_f:
            best_x, best_f = x_new, f_new
        if not converged:
            break
    return NelderMeadResult(best_x.copy(), float(best_f), bool(converged), used)


def numeric_hessian(objective: Callable[[np.ndarray], float], x: Sequence[float]) -> np.ndarray:
    """Central-difference Hessian with steps ``max(1e-4 |x_j|, 1e-6)``.

    Symmetrised as ``(H + H.T) / 2``. Non-finite function values leave NaN or
    inf entries for the caller to detect.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dim = x.size
    steps = np.maximum(1e-4 * np.abs(x), 1e-6)
    f0 = objective(x)
    hess = np.empty((dim, dim))

    def at(*moves):
        point = x.copy()
        for j, sign in moves:
            point[j] += sign * steps[j]
        return objective(point)

    for i in range(dim):
        hess[i, i] = (at((i, 1)) - 2.0 * f0 + at((i, -1))) / steps[i] ** 2
        for j in range(i + 1, dim):
            hess[i, j] = hess[j, i] = (
                at((i, 1), (j, 1)) - at((i, 1), (j, -1)) - at((i, -1), (j, 1)) + at((i, -1), (j, -1))
            ) / (4.0 * steps[i] * steps[j])
    return 0.5 * (hess + hess.T)


def _covariance(hess: np.ndarray) -> tuple[float, np.ndarray | None]:
    if not np.all(np.isfinite(hess)):
        return math.inf, None
    condition = float(np.linalg.cond(hess))
    if not math.isfinite(condition) or condition > CONDITION_CUTOFF:
        return condition, None
    if np.any(np.linalg.eigvalsh(hess) <= 0.0):
        return condition, None
    vcov = np.linalg.inv(hess)
    vcov = 0.5 * (vcov + vcov.T)
    if np.any(np.diag(vcov) <= 0.0):
        return condition, None
    return condition, vcov


def _assemble(kind, names, theta, loglik, n, converged, iterations, hess) -> FitResult:
    condition, vcov = _covariance(hess)
    se = ci = se_obs = None
    if vcov is not None:
        sd = np.sqrt(np.diag(vcov))
        se = tuple(float(s) for s in sd)
        ci = tuple((float(t - Z_95 * s), float(t + Z_95 * s)) for t, s in zip(theta, sd))
        se_obs = tuple(float(s / math.sqrt(n)) for s in sd)
    return FitResult(
        kind=kind,
        param_names=tuple(names),
        estimates=tuple(float(t) for t in theta),
        loglik=float(loglik),
        n=n,
        converged=converged,
        iterations=iterations,
        hessian=hess,
        hessian_condition=condition,
        vcov=vcov,
        se=se,
        ci95=ci,
        se_per_obs=se_obs,
    )


def fit(kind, data, cfg: OptimizerConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of ``kind`` to ``data``.

    Non-convergence is reported through ``FitResult.converged`` rather than
    raised. Needs at least ``k + 1`` observations.
    """
    kind = ModelKind.parse(kind)
    data = _as_data(data)
    cfg = cfg or OptimizerConfig()
    model = MODELS[kind]
    if data.n < model.k + 1:
        raise DataError(f"{kind.value} needs at least {model.k + 1} observations, got {data.n}")

    objective = _safe_nll(kind, data)
    start = np.log(init_params(kind, data))
    result = nelder_mead(lambda z: objective(np.exp(z)), start, cfg)
    theta = np.exp(result.x)
    hess = numeric_hessian(objective, theta)
    return _assemble(
        kind, model.param_names, theta, -result.fun, data.n, result.converged, result.iterations, hess
    )


def fit_core(data, cfg: OptimizerConfig | None = None) -> FitResult:
    """One-parameter MBUW fit directly in the identified ``a = alpha ** beta``.

    The two-parameter likelihood is flat along curves of constant ``a``; this
    fit has a well-conditioned Hessian and a usable standard error for ``a``.
    """
    data = _as_data(data)
    cfg = cfg or OptimizerConfig()
    if data.n < 2:
        raise DataError(f"mbuw core fit needs at least 2 observations, got {data.n}")

    def objective(theta):
        a = float(np.atleast_1d(theta)[0])
        if not (math.isfinite(a) and a > 0.0):
            return math.inf
        with np.errstate(all="ignore"):
            total = -float(np.sum(mbuw_log_pdf(a, data.values)))
        return total if math.isfinite(total) else math.inf

    start = np.log([_mbuw_core_from_mean(float(np.mean(data.values)))])
    result = nelder_mead(lambda z: objective(np.exp(z)), start, cfg)
    theta = np.exp(result.x)
    hess = numeric_hessian(objective, theta)
    return _assemble(
        ModelKind.MBUW, ("a",), theta, -result.fun, data.n, result.converged, result.iterations, hess
    )
