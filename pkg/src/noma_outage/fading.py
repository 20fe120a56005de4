"""Small-scale fading laws for the power channel gain.

Rayleigh fading has exponentially distributed power; Rician fading has
noncentral-chi-square power with two degrees of freedom, parameterized by
shape factor K and mean power omega. Fading gains multiply the
deterministic channel gain, so omega = 1 keeps them unit-mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import log_bessel_i0, marcum_q1

RAYLEIGH = "rayleigh"
RICIAN = "rician"


@dataclass(frozen=True)
class FadingSpec:
    """One user's small-scale fading law.

    Exactly one parameter set is populated: ``lam`` for Rayleigh
    (exponential rate of the power gain) or ``k_factor``/``omega`` for
    Rician (shape factor and mean power).
    """

    kind: str
    lam: float | None = None
    k_factor: float | None = None
    omega: float | None = None

    def __post_init__(self):
        if self.kind == RAYLEIGH:
            if self.lam is None or self.k_factor is not None or self.omega is not None:
                raise ValueError("Rayleigh spec takes lam only")
            if not (self.lam > 0.0 and math.isfinite(self.lam)):
                raise ValueError(f"lam must be positive and finite, got {self.lam}")
        elif self.kind == RICIAN:
            if self.lam is not None or self.k_factor is None or self.omega is None:
                raise ValueError("Rician spec takes k_factor and omega only")
            if not (self.k_factor >= 0.0 and math.isfinite(self.k_factor)):
                raise ValueError(f"k_factor must be >= 0 and finite, got {self.k_factor}")
            if not (self.omega > 0.0 and math.isfinite(self.omega)):
                raise ValueError(f"omega must be positive and finite, got {self.omega}")
        else:
            raise ValueError(f"unknown fading kind {self.kind!r}")

    @classmethod
    def rayleigh(cls, lam: float) -> "FadingSpec":
        return cls(kind=RAYLEIGH, lam=lam)

    @classmethod
    def rician(cls, k_factor: float, omega: float = 1.0) -> "FadingSpec":
        return cls(kind=RICIAN, k_factor=k_factor, omega=omega)

    @property
    def mean_power(self) -> float:
        return 1.0 / self.lam if self.kind == RAYLEIGH else self.omega


def _check_nonneg(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("fading gain argument must be finite and >= 0")
    return arr


def cdf(spec: FadingSpec, x):
    """P[power gain <= x]; scalar in, scalar out, array in, array out."""
    arr = _check_nonneg(x)
    if spec.kind == RAYLEIGH:
        out = -np.expm1(-spec.lam * arr)
    else:
        k, om = spec.k_factor, spec.omega
        out = 1.0 - marcum_q1(math.sqrt(2.0 * k), np.sqrt(2.0 * (1.0 + k) * arr / om))
    return float(out) if np.ndim(out) == 0 else out


def pdf(spec: FadingSpec, x):
    """Density of the power gain, assembled in log space for large K."""
    arr = _check_nonneg(x)
    if spec.kind == RAYLEIGH:
        out = spec.lam * np.exp(-spec.lam * arr)
    else:
        k, om = spec.k_factor, spec.omega
        log_f = (
            math.log1p(k)
            - math.log(om)
            - k
            - (1.0 + k) * arr / om
            + log_bessel_i0(2.0 * np.sqrt(k * (1.0 + k) * arr / om))
        )
        out = np.exp(log_f)
    return float(out) if np.ndim(out) == 0 else out


def sample(spec: FadingSpec, rng: np.random.Generator, size=None):
    """Draw power-gain samples whose empirical CDF converges to cdf().

    Rician draws use the exact noncentral construction: a fixed LOS mean
    plus circular Gaussian scatter, squared.
    """
    if spec.kind == RAYLEIGH:
        return rng.exponential(1.0 / spec.lam, size)
    k, om = spec.k_factor, spec.omega
    nu = math.sqrt(k * om / (1.0 + k))
    sigma = math.sqrt(om / (2.0 * (1.0 + k)))
    g_i = rng.standard_normal(size)
    g_q = rng.standard_normal(size)
    return (nu + sigma * g_i) ** 2 + (sigma * g_q) ** 2


def upper_quantile(spec: FadingSpec, tail_mass: float) -> float:
    """Smallest x with P[gain > x] <= tail_mass, found by doubling on cdf."""
    if not 0.0 < tail_mass < 1.0:
        raise ValueError(f"tail_mass must be in (0, 1), got {tail_mass}")
    if spec.kind == RAYLEIGH:
        return -math.log(tail_mass) / spec.lam
    hi = spec.omega
    while cdf(spec, hi) < 1.0 - tail_mass:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("upper_quantile failed to bracket the tail")
    return hi
