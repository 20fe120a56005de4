"""Special-function kernel used by the closed-form outage expressions.

Everything here is a pure function of its arguments: the zeroth-order
modified Bessel function I0, the first-order Marcum Q-function, Tricomi's
confluent hypergeometric function U evaluated through its real integral
representation, and log-gamma. Callers assemble factorial/power products
in log space, so overflow-safe log companions are provided where the
linear value can exceed double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special


class SeriesTruncationError(RuntimeError):
    """A series evaluation could not reach the requested tolerance.

    Carries the neglected-mass upper bound so callers never mistake a
    truncated value for a converged one.
    """

    def __init__(self, message: str, bound: float):
        super().__init__(message)
        self.bound = bound


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite double sums.

    rel_tol bounds the Poisson mass neglected per series axis; max_terms
    caps the number of terms per axis.
    """

    rel_tol: float = 1e-10
    max_terms: int = 512

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and math.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be positive and finite, got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


# Series/asymptotic crossover for I0. Below this the Taylor series reaches
# machine precision in < 50 terms; above it the large-argument expansion
# is already accurate to ~1e-15.
_I0_CUTOFF = 20.0


def _i0_taylor(x: float) -> float:
    # All terms positive: no cancellation, plain summation is exact enough.
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    for k in range(1, 250):
        term *= q / (k * k)
        total += term
        if term <= total * 1e-17:
            break
    return total


def _log_i0_large(x: float) -> float:
    # I0(x) = e^x / sqrt(2 pi x) * sum_k [prod_{j<=k}(2j-1)^2] / (k! 8^k x^k)
    term = 1.0
    total = 1.0
    for k in range(1, 60):
        ratio = (2 * k - 1) ** 2 / (8.0 * k * x)
        if ratio >= 1.0:  # asymptotic tail started diverging
            break
        term *= ratio
        total += term
        if term <= total * 1e-18:
            break
    return x - 0.5 * math.log(2.0 * math.pi * x) + math.log(total)


def bessel_i0(x: float) -> float:
    """Zeroth-order modified Bessel function of the first kind."""
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"bessel_i0 requires finite x >= 0, got {x}")
    if x <= _I0_CUTOFF:
        return _i0_taylor(x)
    return math.exp(_log_i0_large(x))


def log_bessel_i0(x) -> float:
    """ln I0(x), stable for arguments where I0 itself overflows.

    Accepts a scalar or an ndarray.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return _log_bessel_i0_scalar(float(arr))
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("log_bessel_i0 requires finite x >= 0")
    return np.array([_log_bessel_i0_scalar(float(v)) for v in arr.ravel()]).reshape(arr.shape)


def _log_bessel_i0_scalar(x: float) -> float:
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"log_bessel_i0 requires finite x >= 0, got {x}")
    if x <= _I0_CUTOFF:
        return math.log(_i0_taylor(x))
    return _log_i0_large(x)


# marcum_q1 evaluates the canonical expansion
#   Q1(a, b) = sum_k  Pois(a^2/2){k} * P[Pois(b^2/2) <= k]
# truncated once the outer Poisson mass is covered to ~1e-15. The outer
# mean a^2/2 is capped so the k=0 pmf stays representable.
_MARCUM_MEAN_CAP = 700.0


def marcum_q1(a: float, b) -> float:
    """First-order Marcum Q-function Q1(a, b).

    `b` may be a scalar or an ndarray; the return matches. Nonincreasing
    in b, nondecreasing in a, always within [0, 1].
    """
    a = float(a)
    if not math.isfinite(a) or a < 0.0:
        raise ValueError(f"marcum_q1 requires finite a >= 0, got {a}")
    b_arr = np.asarray(b, dtype=float)
    scalar = b_arr.ndim == 0
    b_arr = np.atleast_1d(b_arr)
    if np.any(b_arr < 0.0) or not np.all(np.isfinite(b_arr)):
        raise ValueError("marcum_q1 requires finite b >= 0")

    mean_a = 0.5 * a * a
    mean_b = 0.5 * b_arr * b_arr
    if mean_a > _MARCUM_MEAN_CAP:
        raise ValueError(
            f"marcum_q1 series evaluator supports a^2/2 <= {_MARCUM_MEAN_CAP}, got {mean_a}"
        )

    if a == 0.0:
        q = np.exp(-mean_b)
    elif np.all(mean_b < _MARCUM_MEAN_CAP):
        q = _marcum_series_fast(mean_a, mean_b)
    else:
        q = _marcum_series_gammainc(mean_a, mean_b)

    q = np.clip(q, 0.0, 1.0)
    return float(q[0]) if scalar else q


def _marcum_outer_range(mean_a: float) -> int:
    k_hi = int(mean_a + 10.0 + 12.0 * math.sqrt(mean_a + 1.0))
    return min(k_hi, 4096)


def _marcum_series_fast(mean_a: float, mean_b: np.ndarray) -> np.ndarray:
    # Inner Poisson CDF by the pmf recurrence; valid while e^{-mean_b} is
    # representable (mean_b < ~700).
    inner_term = np.exp(-mean_b)
    inner_cdf = inner_term.copy()
    outer = math.exp(-mean_a)
    covered = outer
    q = outer * inner_cdf
    for k in range(1, _marcum_outer_range(mean_a) + 1):
        inner_term *= mean_b / k
        inner_cdf += inner_term
        outer *= mean_a / k
        covered += outer
        q += outer * inner_cdf
        if covered >= 1.0 - 1e-16:
            break
    return q


def _marcum_series_gammainc(mean_a: float, mean_b: np.ndarray) -> np.ndarray:
    # Fallback for huge b^2/2 where the pmf recurrence underflows at k=0:
    # the inner Poisson CDF is the regularized upper incomplete gamma.
    q = np.zeros_like(mean_b)
    outer = math.exp(-mean_a)
    covered = outer
    q += outer * special.gammaincc(1.0, mean_b)
    for k in range(1, _marcum_outer_range(mean_a) + 1):
        outer *= mean_a / k
        covered += outer
        q += outer * special.gammaincc(k + 1.0, mean_b)
        if covered >= 1.0 - 1e-16:
            break
    return q


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"log_gamma requires finite x > 0, got {x}")
    return math.lgamma(x)


def _u_integrand_exponent(t: float, a: float, b: float, z: float) -> float:
    # log of t^(a-1) (1+t)^(b-a-1) e^(-z t); the a=1 case must stay finite at t=0
    out = -z * t + (b - a - 1.0) * math.log1p(t)
    if a != 1.0:
        out += (a - 1.0) * math.log(t) if t > 0.0 else -math.inf
    return out


def log_tricomi_u(a: float, b: float, z: float) -> float:
    """ln U(a, b, z) for a >= 1, z > 0 via exp-rescaled adaptive quadrature.

    The integrand of the defining integral is rescaled by its interior
    maximum before integration so the result is usable far outside the
    range where U itself fits in a double.
    """
    a, b, z = float(a), float(b), float(z)
    if not (a >= 1.0 and z > 0.0 and math.isfinite(a) and math.isfinite(b) and math.isfinite(z)):
        raise ValueError(f"log_tricomi_u requires a >= 1, z > 0, got a={a}, b={b}, z={z}")
    # stationary point of the exponent: z t^2 + (z - b + 2) t - (a - 1) = 0
    coef_b = z - b + 2.0
    disc = coef_b * coef_b + 4.0 * z * (a - 1.0)
    t_star = max(0.0, (-coef_b + math.sqrt(max(disc, 0.0))) / (2.0 * z))
    peak = _u_integrand_exponent(t_star, a, b, z) if t_star > 0.0 else 0.0

    def f(t: float) -> float:
        return math.exp(_u_integrand_exponent(t, a, b, z) - peak)

    split = 2.0 * t_star + 1.0
    part1, _ = integrate.quad(f, 0.0, split, epsabs=0.0, epsrel=1e-12, limit=200)
    part2, _ = integrate.quad(f, split, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return peak + math.log(part1 + part2) - math.lgamma(a)


def tricomi_u(a: float, b: float, z: float) -> float:
    """Tricomi confluent hypergeometric U(a, b, z) for a > 0, z > 0.

    Evaluated by adaptive quadrature of the real integral representation
    (1/Gamma(a)) * int_0^inf e^(-z t) t^(a-1) (1+t)^(b-a-1) dt.
    """
    a, b, z = float(a), float(b), float(z)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(z)):
        raise ValueError("tricomi_u requires finite arguments")
    if a <= 0.0 or z <= 0.0:
        raise ValueError(f"tricomi_u requires a > 0 and z > 0, got a={a}, z={z}")
    if a >= 1.0:
        log_u = log_tricomi_u(a, b, z)
        return math.exp(log_u) if log_u < 709.0 else math.inf

    # 0 < a < 1: the t^(a-1) endpoint singularity is removed on [0, 1]
    # by the substitution t = s^(1/a); the tail is integrated directly.
    def head(s: float) -> float:
        t = s ** (1.0 / a)
        return (1.0 + t) ** (b - a - 1.0) * math.exp(-z * t) / a

    def tail(t: float) -> float:
        return t ** (a - 1.0) * (1.0 + t) ** (b - a - 1.0) * math.exp(-z * t)

    part1, _ = integrate.quad(head, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    part2, _ = integrate.quad(tail, 1.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return (part1 + part2) / math.gamma(a)


def poisson_weights(mean: float, ctl: SeriesControl) -> tuple[np.ndarray, float]:
    """Poisson pmf values 0..K covering mass >= 1 - rel_tol, plus the tail mass.

    Raises SeriesTruncationError if max_terms cannot cover the requested
    mass, carrying the achievable bound.
    """
    if mean < 0.0 or not math.isfinite(mean):
        raise ValueError(f"poisson_weights requires finite mean >= 0, got {mean}")
    if mean == 0.0:
        return np.array([1.0]), 0.0
    if mean > _MARCUM_MEAN_CAP:
        raise ValueError(f"poisson_weights supports mean <= {_MARCUM_MEAN_CAP}, got {mean}")
    weights = [math.exp(-mean)]
    covered = weights[0]
    k = 0
    while covered < 1.0 - ctl.rel_tol:
        if k + 1 >= ctl.max_terms:
            raise SeriesTruncationError(
                f"Poisson axis (mean {mean}) not covered to rel_tol={ctl.rel_tol} "
                f"within max_terms={ctl.max_terms}; neglected mass <= {1.0 - covered:.3e}",
                bound=1.0 - covered,
            )
        k += 1
        weights.append(weights[-1] * mean / k)
        covered += weights[-1]
    return np.array(weights), max(1.0 - covered, 0.0)
