"""Special functions and quadrature used throughout the package.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError, QuadratureError

__all__ = [
    "QuadratureResult",
    "log_gamma",
    "log_beta",
    "log1mexp",
    "regularized_incomplete_beta",
    "kolmogorov_cdf",
    "integrate",
]

_EXACT_KOLMOGOROV_MAX_N = 140


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive real ``x``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")
    return math.lgamma(x)


def log_beta(p: float, q: float) -> float:
    return log_gamma(p) + log_gamma(q) - log_gamma(p + q)


def log1mexp(w):
    """Evaluate ``log(1 - exp(w))`` for ``w < 0`` without cancellation.

    Uses the usual split at ``-log 2``: ``log(-expm1(w))`` close to zero and
    ``log1p(-exp(w))`` further out.
    """
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(
            w > -math.log(2.0),
            np.log(-np.expm1(np.minimum(w, 0.0))),
            np.log1p(-np.exp(np.minimum(w, 0.0))),
        )
    return out[()] if out.ndim == 0 else out


def _beta_continued_fraction(x: float, p: float, q: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    tiny = 1e-300
    eps = 1e-16
    qab = p + q
    qap = p + 1.0
    qam = p - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 10_001):
        m2 = 2 * m
        aa = m * (q - m) * x / ((qam + m2) * (p + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise QuadratureError(
        f"incomplete beta continued fraction did not converge for x={x}, p={p}, q={q}",
        partial=h,
    )


def regularized_incomplete_beta(x: float, p: float, q: float) -> float:
    """Regularized incomplete beta function ``I_x(p, q)``.

    Parameters
    ----------
    x : float
        Upper integration limit in ``[0, 1]``.
    p, q : float
        Positive shape parameters.

    Returns
    -------
    float
        ``I_x(p, q)`` in ``[0, 1]``.

    Notes
    -----
    The continued fraction converges quickly for ``x < (p + 1) / (p + q + 2)``;
    above that point the reflection ``I_x(p, q) = 1 - I_{1-x}(q, p)`` is used.
    """
    x, p, q = float(x), float(p), float(q)
    if not (math.isfinite(p) and p > 0.0 and math.isfinite(q) and q > 0.0):
        raise DomainError(f"shape parameters must be finite and positive, got p={p}, q={q}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = p * math.log(x) + q * math.log1p(-x) - log_beta(p, q)
    if x < (p + 1.0) / (p + q + 2.0):
        value = math.exp(log_front) * _beta_continued_fraction(x, p, q) / p
    else:
        value = 1.0 - math.exp(log_front) * _beta_continued_fraction(1.0 - x, q, p) / q
    return min(1.0, max(0.0, value))


def _matrix_power_scaled(h: np.ndarray, n: int) -> tuple[np.ndarray, int]:
    """Return ``(M, e)`` with ``h**n == M * 2**e``, rescaling to avoid overflow."""
    result = np.eye(h.shape[0])
    result_exp = 0
    base = h.copy()
    base_exp = 0
    while n > 0:
        if n & 1:
            result = result @ base
            result_exp += base_exp
            scale = np.abs(result).max()
            if scale > 0:
                e = int(math.frexp(scale)[1])
                result = np.ldexp(result, -e)
                result_exp += e
        n >>= 1
        if n:
            base = base @ base
            base_exp *= 2
            scale = np.abs(base).max()
            if scale > 0:
                e = int(math.frexp(scale)[1])
                base = np.ldexp(base, -e)
                base_exp += e
    return result, result_exp


def _kolmogorov_exact(n: int, d: float) -> float:
    # Durbin's matrix formula in the Marsaglia-Tsang-Wang arrangement
    k = int(n * d) + 1
    m = 2 * k - 1
    h = k - n * d
    idx = np.arange(m)
    diff = idx[:, None] - idx[None, :] + 1  # i - j + 1
    hm = (diff >= 0).astype(float)
    powers = h ** (idx + 1.0)
    hm[:, 0] -= powers
    hm[m - 1, :] -= powers[::-1]
    if 2.0 * h - 1.0 > 0.0:
        hm[m - 1, 0] += (2.0 * h - 1.0) ** m
    fact = np.array([math.lgamma(g + 1.0) for g in range(m + 1)])
    hm = np.where(diff > 0, hm * np.exp(-fact[np.clip(diff, 0, m)]), hm)
    q, q_exp = _matrix_power_scaled(hm, n)
    # multiply by n!/n^n in log space
    log_s = math.log(q[k - 1, k - 1]) if q[k - 1, k - 1] > 0 else -math.inf
    log_s += q_exp * math.log(2.0) + math.lgamma(n + 1.0) - n * math.log(n)
    return math.exp(log_s)


def _kolmogorov_pelz_good(n: int, d: float) -> float:
    """Pelz-Good asymptotic expansion of ``P(D_n <= d)`` to order ``n**-1.5``."""
    z = math.sqrt(n) * d
    z2 = z * z
    pi2 = math.pi**2
    log_q = -pi2 / (8.0 * z2)
    if log_q < -708.0:
        return 0.0
    q = math.exp(log_q)
    kmax = int(math.ceil(16.0 * z / math.pi)) + 1

    # sums over odd integers m = 2k - 1 of c_i(m) q^(m^2)
    terms = np.zeros(4)
    for k in range(1, kmax + 1):
        m2 = (2 * k - 1) ** 2
        weight = q**m2
        if weight == 0.0:
            break
        terms += weight * np.array(
            [
                1.0,
                pi2 * m2 / 4.0 - z2,
                6 * z2**3 + 2 * z2**2 + (2 * z2**2 - 5 * z2) * pi2 * m2 / 4.0
                + pi2**2 * (1 - 2 * z2) * m2**2 / 16.0,
                -30 * z2**3 - 90 * z2**4 + pi2 * (135 * z2**2 - 96 * z2**3) * m2 / 4.0
                + pi2**2 * (212 * z2**2 - 60 * z2) * m2**2 / 16.0
                + pi2**3 * (5 - 30 * z2) * m2**3 / 64.0,
            ]
        )
    root_2pi = math.sqrt(2.0 * math.pi)
    terms *= root_2pi / np.array([z, 6 * z2**2, 72 * z**7, 6480 * z2**5])

    # sums over all integers k of q'^(k^2) with q' = exp(-pi^2 / (2 z^2))
    k = np.arange(1, kmax + 1, dtype=float)
    weights = np.exp(-pi2 * k * k / (2.0 * z2))
    terms[2] -= pi2 * root_2pi / (36.0 * z**3) * np.sum(k * k * weights)
    terms[3] += pi2 * root_2pi / (216.0 * z2**3) * np.sum((3 * z2 - pi2 * k * k) * k * k * weights)

    return float(np.sum(terms / n ** (np.arange(4) / 2.0)))


def kolmogorov_cdf(n: int, d: float) -> float:
    """``P(D_n <= d)`` for the two-sided one-sample Kolmogorov statistic.

    Exact (Durbin's matrix method) for ``n <= 140`` and whenever the matrix stays
    small; otherwise the Pelz-Good asymptotic expansion.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    n = int(n)
    d = float(d)
    if not math.isfinite(d):
        raise DomainError(f"d must be finite, got {d!r}")
    if d <= 0.5 / n:
        return 0.0
    if d >= 1.0:
        return 1.0
    if n > _EXACT_KOLMOGOROV_MAX_N and n * d * d >= 18.0:
        return 1.0
    if n <= _EXACT_KOLMOGOROV_MAX_N or n * d**1.5 < 1.4:
        value = _kolmogorov_exact(n, d)
    else:
        value = _kolmogorov_pelz_good(n, d)
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def _tanh_sinh_nodes(level: int, t_max: float = 6.6):
    """Abscissa offsets and weights for the double-exponential rule on (-1, 1).

    Returns ``(t, delta, w)`` where ``delta = 1 - |x|`` is the distance from the
    nearest endpoint, computed directly so nodes never collapse onto it.
    """
    h = 2.0**-level
    t = np.arange(-t_max, t_max + h / 2, h)
    u = 0.5 * math.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        delta = 2.0 / (np.exp(2.0 * np.abs(u)) + 1.0)
        w = h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return t, delta, w


def _tanh_sinh(f, lo: float, hi: float, tol: float, max_level: int):
    centre = 0.5 * (lo + hi)
    radius = 0.5 * (hi - lo)
    previous = None
    evaluations = 0
    estimate = math.nan
    error = math.inf
    for level in range(2, max_level + 1):
        t, delta, w = _tanh_sinh_nodes(level)
        x = np.where(t < 0, lo + radius * delta, hi - radius * delta)
        keep = (x > lo) & (x < hi) & (w > 0)
        x, w = x[keep], w[keep]
        fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
        evaluations += x.size
        estimate = radius * float(np.dot(w, fx))
        if previous is not None:
            error = abs(estimate - previous)
            if not math.isfinite(estimate):
                break
            if error <= tol:
                return estimate, error, evaluations, True
        previous = estimate
    return estimate, error, evaluations, False


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    max_level: int = 9,
    max_evaluations: int = 2_000_000,
) -> QuadratureResult:
    """Integrate ``f`` over the open interval ``(lo, hi)``.

    Double-exponential (tanh-sinh) quadrature, refined level by level and then
    bisected when a panel fails to converge. Nodes are placed by their distance
    to the nearest endpoint, so integrable endpoint singularities are fine and
    ``f`` is never evaluated at ``lo`` or ``hi`` themselves.

    ``f`` is called with a 1-d float array and must return values of the same
    shape (or a broadcastable scalar).

    Raises
    ------
    QuadratureError
        When the evaluation budget runs out; ``err.partial`` holds the
        best estimate found.
    """
    lo, hi, tol = float(lo), float(hi), float(tol)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainError(f"need finite lo < hi, got ({lo}, {hi})")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")

    total = 0.0
    total_error = 0.0
    evaluations = 0
    stack = [(lo, hi, tol, 0)]
    while stack:
        a, b, panel_tol, depth = stack.pop()
        value, error, used, ok = _tanh_sinh(f, a, b, panel_tol, max_level)
        evaluations += used
        if ok:
            total += value
            total_error += error
            continue
        if depth >= 30 or evaluations >= max_evaluations or not math.isfinite(value):
            raise QuadratureError(
                f"quadrature on ({lo}, {hi}) did not reach tol={tol}",
                partial=QuadratureResult(total + value, total_error + error, max(1, evaluations)),
            )
        mid = 0.5 * (a + b)
        stack.append((mid, b, 0.5 * panel_tol, depth + 1))
        stack.append((a, mid, 0.5 * panel_tol, depth + 1))
    return QuadratureResult(total, total_error, max(1, evaluations))
