"""Deterministic large-scale propagation.

Geometry, terrestrial and aerial path loss in dB, the elevation-angle
line-of-sight probability, and the conversion to linear channel power
gain. All functions accept scalars or ndarrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT_M_S = 2.998e8


@dataclass(frozen=True)
class EnvironmentParams:
    """Carrier and propagation constants for both link domains.

    Terrestrial links use exponent ``alpha_t`` and excess loss ``eta_t_db``;
    aerial links blend LOS/NLOS excess losses through the sigmoid
    LOS-probability model with constants ``plos_a`` (dimensionless) and
    ``plos_b_per_deg`` (per degree of elevation).
    """

    fc_hz: float = 2.5e9
    alpha_t: float = 3.0
    eta_t_db: float = 1.0
    eta_los_db: float = 1.6
    eta_nlos_db: float = 23.0
    plos_a: float = 12.8
    plos_b_per_deg: float = 0.11
    c_m_s: float = SPEED_OF_LIGHT_M_S

    def __post_init__(self):
        if not self.fc_hz > 0.0:
            raise ValueError(f"fc_hz must be positive, got {self.fc_hz}")
        if not self.alpha_t >= 2.0:
            raise ValueError(f"alpha_t must be >= 2, got {self.alpha_t}")
        if self.eta_nlos_db < self.eta_los_db:
            raise ValueError(
                f"eta_nlos_db ({self.eta_nlos_db}) must be >= eta_los_db ({self.eta_los_db})"
            )
        if not self.plos_a > 0.0:
            raise ValueError(f"plos_a must be positive, got {self.plos_a}")
        if not self.plos_b_per_deg > 0.0:
            raise ValueError(f"plos_b_per_deg must be positive, got {self.plos_b_per_deg}")
        if not self.c_m_s > 0.0:
            raise ValueError(f"c_m_s must be positive, got {self.c_m_s}")

    @property
    def free_space_const_db(self) -> float:
        """20 log10(4 pi f_c / c), the frequency-dependent dB constant."""
        return 20.0 * math.log10(4.0 * math.pi * self.fc_hz / self.c_m_s)


@dataclass(frozen=True)
class Geometry:
    """Base-station altitude and a user's horizontal distance, in metres."""

    h_m: float
    r_m: float

    def __post_init__(self):
        if self.h_m < 0.0:
            raise ValueError(f"h_m must be >= 0, got {self.h_m}")
        if self.r_m < 0.0:
            raise ValueError(f"r_m must be >= 0, got {self.r_m}")

    @property
    def d_m(self) -> float:
        """Euclidean base-station/user distance sqrt(h^2 + r^2)."""
        return math.hypot(self.h_m, self.r_m)


def terrestrial_path_loss_db(env: EnvironmentParams, d):
    """Terrestrial loss 10*alpha*log10(d) + beta in dB, strictly increasing in d."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0) or not np.all(np.isfinite(d)):
        raise ValueError("terrestrial_path_loss_db requires finite d > 0")
    beta = env.free_space_const_db + env.eta_t_db
    out = 10.0 * env.alpha_t * np.log10(d) + beta
    return float(out) if out.ndim == 0 else out


def p_los(env: EnvironmentParams, h, r):
    """Line-of-sight probability of the elevation-angle sigmoid model.

    The elevation angle arctan(h/r) enters in degrees, matching the
    degree-calibrated environment constants.
    """
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(h < 0.0):
        raise ValueError("p_los requires h >= 0")
    if np.any((r <= 0.0) & (h <= 0.0)):
        raise ValueError("p_los: elevation angle undefined for h = 0, r <= 0")
    theta_deg = np.degrees(np.arctan2(h, r))
    out = 1.0 / (1.0 + env.plos_a * np.exp(-env.plos_b_per_deg * (theta_deg - env.plos_a)))
    return float(out) if out.ndim == 0 else out


def aerial_path_loss_db(env: EnvironmentParams, h, r):
    """Aerial loss 20*log10(d) + A*p_los + B in dB.

    A = eta_los - eta_nlos and B = free-space constant + eta_nlos, so the
    loss interpolates between the all-LOS and all-NLOS free-space curves.
    """
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    d = np.hypot(h, r)
    if np.any(d <= 0.0):
        raise ValueError("aerial_path_loss_db requires h^2 + r^2 > 0")
    a_db = env.eta_los_db - env.eta_nlos_db
    b_db = env.free_space_const_db + env.eta_nlos_db
    out = 20.0 * np.log10(d) + a_db * p_los(env, h, r) + b_db
    return float(out) if np.ndim(out) == 0 else out


def channel_gain(loss_db):
    """Linear power gain 10^(-loss_db/10); strictly decreasing in loss_db."""
    loss_db = np.asarray(loss_db, dtype=float)
    if not np.all(np.isfinite(loss_db)):
        raise ValueError("channel_gain requires finite loss_db")
    out = np.power(10.0, -0.1 * loss_db)
    return float(out) if out.ndim == 0 else out


def terrestrial_gain(env: EnvironmentParams, d):
    """Linear terrestrial channel gain at distance d."""
    return channel_gain(terrestrial_path_loss_db(env, d))


def aerial_gain(env: EnvironmentParams, h, r):
    """Linear aerial channel gain at altitude h and horizontal distance r."""
    return channel_gain(aerial_path_loss_db(env, h, r))
