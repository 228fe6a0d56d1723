"""Density, distribution, hazard, quantile and moment kernels on (0, 1).

The median-based unit Weibull (MBUW) law with shape pair ``(alpha, beta)``
depends on its parameters only through the core value ``a = alpha ** beta``:

    f(y) = (6 / a) (1 - y^(1/a)) y^(2/a - 1)
    F(y) = 3 y^(2/a) - 2 y^(3/a)

so every MBUW kernel below takes ``a``. The one-parameter median-based unit
Rayleigh (MBUR) law is MBUW with ``beta = 2``.

Competitor models (Beta, Kumaraswamy, Topp-Leone, unit-Lindley) are reached
through :data:`MODELS`, keyed by :class:`ModelKind`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError, HazardOverflowError
from .special import log1mexp, log_beta, regularized_incomplete_beta

__all__ = [
    "ShapeParams",
    "CoreParam",
    "ModelKind",
    "MomentSummary",
    "UnitModel",
    "MODELS",
    "core",
    "mbuw_pdf",
    "mbuw_log_pdf",
    "mbuw_cdf",
    "survival",
    "hazard",
    "reversed_hazard",
    "mbuw_quantile",
    "sample",
    "sample_median_of_three",
    "raw_moment",
    "variance_closed_form",
    "moment_summary",
    "incomplete_moment",
    "competitor_pdf",
    "competitor_log_pdf",
    "competitor_cdf",
    "competitor_quantile",
]


def _check_positive(name: str, value) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be finite and positive, got {value!r}")
    return value


@dataclass(frozen=True)
class ShapeParams:
    alpha: float
    beta: float

    def __post_init__(self):
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)


@dataclass(frozen=True)
class CoreParam:
    """The identified MBUW parameter ``a = alpha ** beta``."""

    a: float

    def __post_init__(self):
        _check_positive("a", self.a)


def core(params: ShapeParams) -> CoreParam:
    """Collapse ``(alpha, beta)`` to ``a = alpha ** beta``.

    Overflow to infinity or underflow to zero is rejected rather than clamped.
    """
    try:
        a = float(params.alpha) ** float(params.beta)
    except OverflowError:
        a = math.inf
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError(
            f"alpha**beta = {params.alpha}**{params.beta} is not representable as a positive finite float"
        )
    return CoreParam(a)


def _as_core(a) -> float:
    if isinstance(a, CoreParam):
        return a.a
    return _check_positive("a", a)


def _open_unit(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.all((y > 0.0) & (y < 1.0)):
        raise DomainError("y must lie strictly inside (0, 1)")
    return y


def _closed_unit(y, name="y") -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.all((y >= 0.0) & (y <= 1.0)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return y


def _scalar(out: np.ndarray):
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# MBUW kernels
# ---------------------------------------------------------------------------


def mbuw_pdf(a, y):
    """MBUW density at ``y`` in (0, 1)."""
    a = _as_core(a)
    y = _open_unit(y)
    log_y = np.log(y)
    with np.errstate(over="ignore"):
        out = (6.0 / a) * -np.expm1(log_y / a) * np.exp((2.0 / a - 1.0) * log_y)
    return _scalar(out)


def mbuw_log_pdf(a, y):
    """Log density, stable as ``y -> 1`` where ``1 - y^(1/a)`` cancels."""
    a = _as_core(a)
    y = _open_unit(y)
    log_y = np.log(y)
    out = math.log(6.0) - math.log(a) + log1mexp(log_y / a) + (2.0 / a - 1.0) * log_y
    return _scalar(np.asarray(out))


def _t_and_complement(a: float, y: np.ndarray):
    # t = y^(1/a) and 1 - t, the latter without cancellation
    with np.errstate(divide="ignore"):
        w = np.log(y) / a
    return np.exp(w), -np.expm1(w)


def mbuw_cdf(a, y):
    a = _as_core(a)
    y = _closed_unit(y)
    t, _ = _t_and_complement(a, y)
    return _scalar(t * t * (3.0 - 2.0 * t))


def survival(a, y):
    """``S(y) = 1 - F(y) = (1 - t)^2 (1 + 2t)`` with ``t = y^(1/a)``."""
    a = _as_core(a)
    y = _open_unit(y)
    t, s = _t_and_complement(a, y)
    return _scalar(s * s * (1.0 + 2.0 * t))


def hazard(a, y):
    """Hazard rate ``f / S``.

    Raises
    ------
    HazardOverflowError
        Where the survival function underflows to zero.
    """
    a = _as_core(a)
    y = _open_unit(y)
    t, s = _t_and_complement(a, y)
    sf = s * s * (1.0 + 2.0 * t)
    if np.any(sf == 0.0):
        raise HazardOverflowError("survival function underflows to 0; hazard is unbounded here")
    # f / S with the common factor (1 - t) cancelled
    log_y = np.log(y)
    with np.errstate(over="ignore"):
        out = (6.0 / a) * np.exp((2.0 / a - 1.0) * log_y) / (s * (1.0 + 2.0 * t))
    if not np.all(np.isfinite(out)):
        raise HazardOverflowError("hazard rate overflows")
    return _scalar(out)


def reversed_hazard(a, y):
    """Reversed hazard ``f / F``; behaves like ``(2/a) / y`` near zero."""
    a = _as_core(a)
    y = _open_unit(y)
    t, s = _t_and_complement(a, y)
    # f / F = (6/a) (1-t) t^2 / y / (t^2 (3 - 2t))
    out = (6.0 / a) * s / (y * (3.0 - 2.0 * t))
    return _scalar(out)


def mbuw_quantile(a, u):
    """Inverse CDF via the trigonometric root of ``3t^2 - 2t^3 = u``.

    With ``phi = arccos(1 - 2u) / 3`` the root in [0, 1] is
    ``t = 1/2 + sin(phi - pi/6) = (sqrt(3)/2) sin(phi) + sin(phi/2)^2``,
    and ``y = t ** a``. The second form and ``arccos(1 - 2u) = 2 arcsin(sqrt(u))``
    keep full relative precision for small ``u``.
    """
    a = _as_core(a)
    u = _closed_unit(u, "u")
    phi = 2.0 * np.arcsin(np.sqrt(u)) / 3.0
    t = 0.5 * math.sqrt(3.0) * np.sin(phi) + np.sin(0.5 * phi) ** 2
    t = np.where(u >= 1.0, 1.0, np.clip(t, 0.0, 1.0))
    with np.errstate(divide="ignore"):
        out = np.where(t > 0.0, np.exp(a * np.log(np.where(t > 0.0, t, 1.0))), 0.0)
    return _scalar(out)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def sample(a, n: int, seed: int | None = None) -> np.ndarray:
    """Inverse-transform draws from MBUW(a); PCG64 seeded by ``seed``."""
    a = _as_core(a)
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    u = _rng(seed).random(int(n))
    return mbuw_quantile(a, u)


def sample_median_of_three(params: ShapeParams, n: int, seed: int | None = None) -> np.ndarray:
    """Draw ``exp(-m ** beta)`` where ``m`` is the median of three Weibull(alpha, beta) variates.

    Weibull here has scale ``alpha`` and shape ``beta``. The transform uses the
    unscaled median: ``y = exp(-m ** beta)`` gives ``y^(1/a) = exp(-(m/alpha)^beta)``,
    which reproduces ``F(y) = 3 y^(2/a) - 2 y^(3/a)`` with ``a = alpha ** beta``.
    The scaled alternative ``exp(-(m/alpha) ** beta)`` always yields ``a = 1``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    rng = _rng(seed)
    x = params.alpha * rng.weibull(params.beta, size=(int(n), 3))
    m = np.median(x, axis=1)
    return np.exp(-(m**params.beta))


def raw_moment(a, r) -> float:
    """``E(y^r) = 6 / ((2 + r a)(3 + r a))``."""
    a = _as_core(a)
    if r < 0:
        raise DomainError(f"moment order must be non-negative, got {r}")
    return 6.0 / ((2.0 + r * a) * (3.0 + r * a))


def variance_closed_form(a) -> float:
    """Variance as a single rational function of ``a``."""
    a = _as_core(a)
    num = 78.0 * a**2 + 60.0 * a**3 + 6.0 * a**4
    den = (6.0 + 10.0 * a + 4.0 * a**2) * (6.0 + 5.0 * a + a**2) ** 2
    return num / den


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    cv: float


def moment_summary(a) -> MomentSummary:
    a = _as_core(a)
    m1, m2, m3, m4 = (raw_moment(a, r) for r in (1, 2, 3, 4))
    # same value as m2 - m1**2, without the cancellation at small a
    var = variance_closed_form(a)
    sd = math.sqrt(var)
    skew = (m3 - m1 * (3.0 * var + m1 * m1)) / sd**3
    central4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1**4
    return MomentSummary(
        mean=m1,
        variance=var,
        skewness=skew,
        kurtosis=central4 / var**2,
        cv=sd / m1,
    )


def incomplete_moment(a, r, t) -> float:
    """Unnormalised truncated moment ``integral_0^t y^r f(y) dy``."""
    a = _as_core(a)
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise DomainError(f"t must lie in (0, 1], got {t}")
    if r < 0:
        raise DomainError(f"moment order must be non-negative, got {r}")
    log_t = math.log(t)
    return 6.0 * math.exp((2.0 / a + r) * log_t) / (2.0 + r * a) - 6.0 * math.exp(
        (3.0 / a + r) * log_t
    ) / (3.0 + r * a)


# ---------------------------------------------------------------------------
# Model registry
# ---------------------------------------------------------------------------


class ModelKind(str, enum.Enum):
    MBUW = "mbuw"
    MBUR = "mbur"
    BETA = "beta"
    KUMARASWAMY = "kumaraswamy"
    TOPP_LEONE = "topp-leone"
    UNIT_LINDLEY = "unit-lindley"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"toppleone": "topp-leone", "unitlindley": "unit-lindley", "kuma": "kumaraswamy"}
        key = aliases.get(key.replace("-", ""), key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown model {value!r}; expected one of {names}") from None

    @property
    def k(self) -> int:
        return MODELS[self].k


@dataclass(frozen=True)
class UnitModel:
    """Kernels for one model family; every callable takes ``(theta, y)``."""

    kind: ModelKind
    param_names: tuple[str, ...]
    log_pdf: Callable
    cdf: Callable
    quantile: Callable

    @property
    def k(self) -> int:
        return len(self.param_names)

    def check(self, theta) -> tuple[float, ...]:
        theta = tuple(np.atleast_1d(np.asarray(theta, dtype=float)).tolist())
        if len(theta) != self.k:
            raise DomainError(f"{self.kind.value} takes {self.k} parameter(s), got {len(theta)}")
        for name, value in zip(self.param_names, theta):
            _check_positive(name, value)
        return theta


def _mbuw_core(theta) -> float:
    return core(ShapeParams(*theta)).a


def _mbur_core(theta) -> float:
    return core(ShapeParams(theta[0], 2.0)).a


def _beta_log_pdf(theta, y):
    p, q = theta
    return (p - 1.0) * np.log(y) + (q - 1.0) * np.log1p(-y) - log_beta(p, q)


def _beta_cdf(theta, y):
    p, q = theta
    flat = [regularized_incomplete_beta(v, p, q) for v in np.ravel(y)]
    return np.reshape(np.asarray(flat, dtype=float), np.shape(y))


def _kumaraswamy_log_pdf(theta, y):
    p, q = theta
    log_y = np.log(y)
    return math.log(p * q) + (p - 1.0) * log_y + (q - 1.0) * log1mexp(p * log_y)


def _kumaraswamy_cdf(theta, y):
    p, q = theta
    with np.errstate(divide="ignore"):
        log_y = np.log(y)
    inner = np.where(y > 0.0, log1mexp(np.where(y > 0.0, p * log_y, -1.0)), 0.0)
    return -np.expm1(q * inner)


def _kumaraswamy_quantile(theta, u):
    p, q = theta
    with np.errstate(divide="ignore"):
        # y = (1 - (1 - u)^(1/q))^(1/p)
        inner = -np.expm1(np.log1p(-u) / q)
        return np.where(inner > 0.0, np.exp(np.log(np.where(inner > 0.0, inner, 1.0)) / p), 0.0)


def _topp_leone_log_pdf(theta, y):
    (th,) = theta
    return math.log(2.0 * th) + np.log1p(-y) + (th - 1.0) * np.log(y * (2.0 - y))


def _topp_leone_cdf(theta, y):
    (th,) = theta
    return (y * (2.0 - y)) ** th


def _topp_leone_quantile(theta, u):
    (th,) = theta
    # 2y - y^2 = v with v = u^(1/th), so y = 1 - sqrt(1 - v) = v / (1 + sqrt(1 - v))
    v = u ** (1.0 / th)
    return v / (1.0 + np.sqrt(1.0 - v))


def _unit_lindley_log_pdf(theta, y):
    (th,) = theta
    return 2.0 * math.log(th) - math.log1p(th) - 3.0 * np.log1p(-y) - th * y / (1.0 - y)


def _unit_lindley_cdf(theta, y):
    (th,) = theta
    y = np.asarray(y, dtype=float)
    out = np.ones_like(y)
    inside = y < 1.0
    z = y[inside] / (1.0 - y[inside])
    out[inside] = -np.expm1(-th * z) - th * z / (1.0 + th) * np.exp(-th * z)
    return out


def _bisect_quantile(cdf):
    def quantile(theta, u):
        u = np.asarray(u, dtype=float)
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = cdf(theta, mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 4e-16 * np.maximum(hi, 1e-300)):
                break
        return np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, 0.5 * (lo + hi)))

    return quantile


def _via_core(core_of, kernel):
    return lambda theta, y: kernel(core_of(theta), y)


MODELS: dict[ModelKind, UnitModel] = {
    ModelKind.MBUW: UnitModel(
        ModelKind.MBUW,
        ("alpha", "beta"),
        _via_core(_mbuw_core, mbuw_log_pdf),
        _via_core(_mbuw_core, mbuw_cdf),
        _via_core(_mbuw_core, mbuw_quantile),
    ),
    ModelKind.MBUR: UnitModel(
        ModelKind.MBUR,
        ("alpha",),
        _via_core(_mbur_core, mbuw_log_pdf),
        _via_core(_mbur_core, mbuw_cdf),
        _via_core(_mbur_core, mbuw_quantile),
    ),
    ModelKind.BETA: UnitModel(
        ModelKind.BETA, ("alpha", "beta"), _beta_log_pdf, _beta_cdf, _bisect_quantile(_beta_cdf)
    ),
    ModelKind.KUMARASWAMY: UnitModel(
        ModelKind.KUMARASWAMY,
        ("alpha", "beta"),
        _kumaraswamy_log_pdf,
        _kumaraswamy_cdf,
        _kumaraswamy_quantile,
    ),
    ModelKind.TOPP_LEONE: UnitModel(
        ModelKind.TOPP_LEONE, ("theta",), _topp_leone_log_pdf, _topp_leone_cdf, _topp_leone_quantile
    ),
    ModelKind.UNIT_LINDLEY: UnitModel(
        ModelKind.UNIT_LINDLEY,
        ("theta",),
        _unit_lindley_log_pdf,
        _unit_lindley_cdf,
        _bisect_quantile(_unit_lindley_cdf),
    ),
}

# models whose quantile is an explicit formula rather than numerical inversion
CLOSED_FORM_QUANTILE = frozenset(
    {ModelKind.MBUW, ModelKind.MBUR, ModelKind.KUMARASWAMY, ModelKind.TOPP_LEONE}
)


def competitor_log_pdf(kind, theta, y):
    model = MODELS[ModelKind.parse(kind)]
    theta = model.check(theta)
    return _scalar(np.asarray(model.log_pdf(theta, _open_unit(y)), dtype=float))


def competitor_pdf(kind, theta, y):
    return _scalar(np.exp(np.asarray(competitor_log_pdf(kind, theta, y))))


def competitor_cdf(kind, theta, y):
    model = MODELS[ModelKind.parse(kind)]
    theta = model.check(theta)
    y = _closed_unit(y)
    return _scalar(np.clip(np.asarray(model.cdf(theta, y), dtype=float), 0.0, 1.0))


def competitor_quantile(kind, theta, u):
    model = MODELS[ModelKind.parse(kind)]
    theta = model.check(theta)
    return _scalar(np.asarray(model.quantile(theta, _closed_unit(u, "u")), dtype=float))
