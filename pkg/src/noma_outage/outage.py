"""Closed-form rate-outage probabilities for two-user NOMA and OMA links.

Covers OMA in both domains, downlink NOMA for near and far user, the
uplink far user, and the uplink near user: a Rayleigh closed form for
terrestrial links and, for aerial links, a Poisson-weighted double series
over Erlang mixture components whose brackets are assembled from Tricomi-U
values in log space. An independent adaptive-quadrature path for the same
uplink near-user event is provided for cross-checks.

Convention used throughout: user 1 is the near user, user 2 the far user;
the uplink near-user event is P{X_near < slope * X_far + offset} where the
slope and offset derive from the rate threshold and the two link budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import fading as fad
from .channel import EnvironmentParams, aerial_gain, terrestrial_gain
from .fading import RAYLEIGH, RICIAN, FadingSpec
from .specfun import SeriesControl, log_tricomi_u, poisson_weights

UPLINK = "uplink"
DOWNLINK = "downlink"
TERRESTRIAL = "terrestrial"
AERIAL = "aerial"
NOMA = "noma"
OMA = "oma"

CLOSED_FORM = "closed_form"
SERIES = "series"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class OutageResult:
    """Outage probability plus evaluation diagnostics."""

    probability: float
    method: str
    terms_used: int | None = None
    truncation_bound: float | None = None
    std_error: float | None = None
    infeasible: bool = False

    def __post_init__(self):
        if not (0.0 <= self.probability <= 1.0):
            raise ValueError(f"probability outside [0, 1]: {self.probability}")
        if self.truncation_bound is not None and self.truncation_bound < 0.0:
            raise ValueError(f"truncation_bound must be >= 0, got {self.truncation_bound}")


@dataclass(frozen=True)
class LinkScenario:
    """One fully specified two-user link.

    Powers are normalized to the receiver noise power: downlink carries
    the aggregate ``p_total`` with near-user split ``a1``; uplink carries
    per-user ``p1``/``p2``. Geometry is shared altitude ``h`` plus
    horizontal user distances ``r1 <= r2``.
    """

    direction: str
    domain: str
    scheme: str
    env: EnvironmentParams
    h: float
    r1: float
    r2: float
    r_th: float
    fading1: FadingSpec
    fading2: FadingSpec
    p_total: float | None = None
    a1: float | None = None
    p1: float | None = None
    p2: float | None = None

    def __post_init__(self):
        if self.direction not in (UPLINK, DOWNLINK):
            raise ValueError(f"direction must be uplink|downlink, got {self.direction!r}")
        if self.domain not in (TERRESTRIAL, AERIAL):
            raise ValueError(f"domain must be terrestrial|aerial, got {self.domain!r}")
        if self.scheme not in (NOMA, OMA):
            raise ValueError(f"scheme must be noma|oma, got {self.scheme!r}")
        if self.domain == TERRESTRIAL and self.h != 0.0:
            raise ValueError("terrestrial scenarios require h = 0")
        if self.h < 0.0 or self.r1 < 0.0 or self.r2 < 0.0:
            raise ValueError("geometry must be nonnegative")
        if self.r1 > self.r2:
            raise ValueError(f"user 1 is the near user: need r1 <= r2, got {self.r1} > {self.r2}")
        if self.r_th < 0.0 or not math.isfinite(self.r_th):
            raise ValueError(f"r_th must be finite and >= 0, got {self.r_th}")
        expected = RAYLEIGH if self.domain == TERRESTRIAL else RICIAN
        for name, spec in (("fading1", self.fading1), ("fading2", self.fading2)):
            if spec.kind != expected:
                raise ValueError(f"{name} must be {expected} for a {self.domain} scenario")
        if self.direction == DOWNLINK:
            if self.p_total is None or not self.p_total > 0.0:
                raise ValueError("downlink requires p_total > 0")
            if self.scheme == NOMA and not (self.a1 is not None and 0.0 < self.a1 < 1.0):
                raise ValueError(f"downlink NOMA requires a1 in (0, 1), got {self.a1}")
        else:
            if self.p1 is None or self.p2 is None or self.p1 <= 0.0 or self.p2 <= 0.0:
                raise ValueError("uplink requires p1 > 0 and p2 > 0")

    @property
    def a2(self) -> float:
        return 1.0 - self.a1

    def gain(self, user: int) -> float:
        """Linear large-scale channel gain for user 1 or 2."""
        r = self.r1 if user == 1 else self.r2
        if self.domain == TERRESTRIAL:
            return terrestrial_gain(self.env, r)
        return aerial_gain(self.env, self.h, r)

    def fading_spec(self, user: int) -> FadingSpec:
        return self.fading1 if user == 1 else self.fading2


def _check_user(user: int) -> None:
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")


def oma_outage(scn: LinkScenario, user: int) -> OutageResult:
    """Outage of user 1 or 2 under half-time orthogonal access.

    The half-time prelog doubles the SNR threshold exponent: outage is
    F_X((2^(2 r_th) - 1) / (P_i G_i)). Downlink OMA serves each user with
    the full aggregate power during its slot; uplink uses per-user powers.
    """
    _check_user(user)
    if scn.scheme != OMA:
        raise ValueError("oma_outage requires an OMA scenario")
    if scn.r_th == 0.0:
        return OutageResult(0.0, CLOSED_FORM)
    power = scn.p_total if scn.direction == DOWNLINK else (scn.p1 if user == 1 else scn.p2)
    threshold = (2.0 ** (2.0 * scn.r_th) - 1.0) / (power * scn.gain(user))
    return OutageResult(fad.cdf(scn.fading_spec(user), threshold), CLOSED_FORM)


def dl_noma_outage(scn: LinkScenario, user: int) -> OutageResult:
    """Downlink NOMA outage for the near (1) or far (2) user.

    The far user's SINR is capped at a2/a1, so when the rate threshold
    exceeds that cap the outage is exactly 1 and the result is flagged
    infeasible.
    """
    _check_user(user)
    if scn.direction != DOWNLINK or scn.scheme != NOMA:
        raise ValueError("dl_noma_outage requires a downlink NOMA scenario")
    if scn.r_th == 0.0:
        return OutageResult(0.0, CLOSED_FORM)
    threshold_snr = 2.0 ** scn.r_th - 1.0
    if user == 1:
        beta = threshold_snr / (scn.a1 * scn.p_total * scn.gain(1))
    else:
        feasibility = scn.a2 - threshold_snr * scn.a1
        if feasibility <= 0.0:
            return OutageResult(1.0, CLOSED_FORM, infeasible=True)
        beta = (threshold_snr / (scn.p_total * scn.gain(2))) / feasibility
    return OutageResult(fad.cdf(scn.fading_spec(user), beta), CLOSED_FORM)


def ul_noma_outage_far(scn: LinkScenario) -> OutageResult:
    """Uplink outage of the far user, which is decoded free of interference."""
    if scn.direction != UPLINK or scn.scheme != NOMA:
        raise ValueError("ul_noma_outage_far requires an uplink NOMA scenario")
    if scn.r_th == 0.0:
        return OutageResult(0.0, CLOSED_FORM)
    threshold = (2.0 ** scn.r_th - 1.0) / (scn.p2 * scn.gain(2))
    return OutageResult(fad.cdf(scn.fading2, threshold), CLOSED_FORM)


def _interference_coeffs(g1: float, g2: float, p1: float, p2: float, r_th: float):
    # Event form of the uplink near-user outage: X1 < slope*X2 + offset.
    snr_th = 2.0 ** r_th - 1.0
    return snr_th * p2 * g2 / (p1 * g1), snr_th / (p1 * g1)


def interference_outage_rayleigh(slope: float, offset: float, lam1: float, lam2: float) -> float:
    """P{X1 < slope*X2 + offset} for independent exponential powers."""
    if slope < 0.0 or offset < 0.0:
        raise ValueError("slope and offset must be >= 0")
    return 1.0 - lam2 * math.exp(-offset * lam1) / (lam2 + slope * lam1)


def ul_noma_outage_near_terrestrial(
    g1: float, g2: float, p1: float, p2: float, r_th: float, lam1: float, lam2: float
) -> OutageResult:
    """Uplink near-user outage over Rayleigh links, in closed form."""
    if min(g1, g2, p1, p2, lam1, lam2) <= 0.0:
        raise ValueError("gains, powers, and rates must be positive")
    if r_th == 0.0:
        return OutageResult(0.0, CLOSED_FORM)
    slope, offset = _interference_coeffs(g1, g2, p1, p2, r_th)
    return OutageResult(interference_outage_rayleigh(slope, offset, lam1, lam2), CLOSED_FORM)


def interference_outage_series(
    slope: float,
    offset: float,
    near: FadingSpec,
    far: FadingSpec,
    ctl: SeriesControl | None = None,
) -> OutageResult:
    """P{X_near < slope*X_far + offset} for independent Rician powers.

    Both Rician laws are expanded as Poisson mixtures of Erlang components;
    each mixture bracket is a Tricomi-U expression evaluated in log space.
    The reported truncation bound is the neglected joint Poisson mass,
    which bounds the absolute error because every bracket lies in [0, 1].

    Parameters
    ----------
    slope, offset : float
        Event coefficients; both must be positive (dispatch the degenerate
        slope = 0 case to the plain near-user CDF instead).
    near, far : FadingSpec
        Rician specs for the near and far user.
    ctl : SeriesControl
        Truncation policy; defaults to rel_tol 1e-10, 512 terms per axis.
    """
    if near.kind != RICIAN or far.kind != RICIAN:
        raise ValueError("interference_outage_series requires Rician fading specs")
    if slope <= 0.0 or offset <= 0.0:
        raise ValueError("series form requires slope > 0 and offset > 0")
    ctl = ctl or SeriesControl()

    k1, om1 = near.k_factor, near.omega
    k2, om2 = far.k_factor, far.omega
    n1 = (1.0 + k1) / om1
    n2 = (1.0 + k2) / om2
    z = (n2 + n1 * slope) * offset / slope

    w_near, tail_near = poisson_weights(k1, ctl)
    w_far, tail_far = poisson_weights(k2, ctl)
    bound = 1.0 - (1.0 - tail_near) * (1.0 - tail_far)

    log_n1a1 = math.log(n1 * slope)
    log_ratio = math.log(offset / slope)
    prob = 0.0
    terms = 0
    # Bracket(j1, j2) = P{Erlang(j1+1, n1) < slope*Erlang(j2+1, n2) + offset}
    #                 = 1 - e^(-n1*offset) * sum_{j<=j1} c_j(j2).
    # The partial sums telescope along j1, so each (j1, j2) cell costs one
    # Tricomi-U evaluation.
    for j2 in range(len(w_far)):
        base = (j2 + 1) * (math.log(n2) + log_ratio)
        log_sum = -math.inf
        for j1 in range(len(w_near)):
            log_u = log_tricomi_u(j2 + 1, j2 + j1 + 2, z)
            log_c = j1 * (log_n1a1 + log_ratio) - math.lgamma(j1 + 1) + base + log_u
            log_sum = np.logaddexp(log_sum, log_c)
            bracket = -math.expm1(-n1 * offset + log_sum)
            bracket = min(1.0, max(0.0, bracket))
            prob += w_near[j1] * w_far[j2] * bracket
            terms += 1
    prob = min(1.0, max(0.0, prob))
    return OutageResult(prob, SERIES, terms_used=terms, truncation_bound=bound)


def interference_outage_quadrature(
    slope: float, offset: float, near: FadingSpec, far: FadingSpec
) -> OutageResult:
    """Same event as the series form, by adaptive quadrature of
    int_0^inf F_near(slope*x + offset) f_far(x) dx. Works for any fading mix."""
    if slope < 0.0 or offset < 0.0:
        raise ValueError("slope and offset must be >= 0")
    if slope == 0.0:
        return OutageResult(fad.cdf(near, offset), CLOSED_FORM)
    x_hi = fad.upper_quantile(far, 1e-13)
    value, _ = integrate.quad(
        lambda x: fad.cdf(near, slope * x + offset) * fad.pdf(far, x),
        0.0,
        x_hi,
        epsabs=1e-13,
        epsrel=1e-11,
        limit=200,
    )
    return OutageResult(min(1.0, max(0.0, value)), QUADRATURE)


def ul_noma_outage_near_aerial(
    g1: float,
    g2: float,
    p1: float,
    p2: float,
    r_th: float,
    fading1: FadingSpec,
    fading2: FadingSpec,
    ctl: SeriesControl | None = None,
) -> OutageResult:
    """Uplink near-user outage over Rician links via the double series."""
    if min(g1, g2, p1, p2) <= 0.0:
        raise ValueError("gains and powers must be positive")
    if r_th == 0.0:
        return OutageResult(0.0, CLOSED_FORM)
    slope, offset = _interference_coeffs(g1, g2, p1, p2, r_th)
    if slope == 0.0:
        return OutageResult(fad.cdf(fading1, offset), CLOSED_FORM)
    return interference_outage_series(slope, offset, fading1, fading2, ctl)


def ul_noma_outage_near(
    scn: LinkScenario, ctl: SeriesControl | None = None, engine: str = "auto"
) -> OutageResult:
    """Scenario-level dispatch for the uplink near-user outage.

    engine="auto" uses the Rayleigh closed form on terrestrial scenarios
    and the Rician series on aerial ones; engine="quadrature" forces the
    independent integral path on either domain.
    """
    if scn.direction != UPLINK or scn.scheme != NOMA:
        raise ValueError("ul_noma_outage_near requires an uplink NOMA scenario")
    g1, g2 = scn.gain(1), scn.gain(2)
    if engine == "quadrature":
        if scn.r_th == 0.0:
            return OutageResult(0.0, CLOSED_FORM)
        slope, offset = _interference_coeffs(g1, g2, scn.p1, scn.p2, scn.r_th)
        return interference_outage_quadrature(slope, offset, scn.fading1, scn.fading2)
    if engine != "auto":
        raise ValueError(f"engine must be auto|quadrature, got {engine!r}")
    if scn.domain == TERRESTRIAL:
        return ul_noma_outage_near_terrestrial(
            g1, g2, scn.p1, scn.p2, scn.r_th, scn.fading1.lam, scn.fading2.lam
        )
    return ul_noma_outage_near_aerial(
        g1, g2, scn.p1, scn.p2, scn.r_th, scn.fading1, scn.fading2, ctl
    )


def noma_outage(scn: LinkScenario, user: int, ctl: SeriesControl | None = None) -> OutageResult:
    """NOMA outage for either direction, dispatching to the right form."""
    _check_user(user)
    if scn.direction == DOWNLINK:
        return dl_noma_outage(scn, user)
    if user == 2:
        return ul_noma_outage_far(scn)
    return ul_noma_outage_near(scn, ctl)


def noma_gain(p_oma: OutageResult, p_noma: OutageResult) -> float:
    """OMA outage minus NOMA outage; positive favours NOMA."""
    return p_oma.probability - p_noma.probability
