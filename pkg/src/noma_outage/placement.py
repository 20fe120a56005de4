"""Order-statistics placement model and placement-averaged outage.

Users are dropped uniformly on a disk, so a single radius has density
2r/R^2. The near and far users are the minimum and maximum of N such
radii; outage is averaged over those order-statistics densities with the
product approximation for the joint law (its error is quantified by the
position-randomizing Monte-Carlo estimator, not hidden).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fading as fad
from . import outage as out
from .channel import aerial_gain, terrestrial_gain
from .outage import DOWNLINK, NOMA, OMA, TERRESTRIAL, UPLINK, LinkScenario
from .specfun import SeriesControl


class QuadratureError(RuntimeError):
    """Fixed-order quadrature failed its self-consistency check."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class PlacementModel:
    n_users: int = 100
    cell_radius: float = 500.0

    def __post_init__(self):
        if self.n_users < 2:
            raise ValueError(f"n_users must be >= 2, got {self.n_users}")
        if not self.cell_radius > 0.0:
            raise ValueError(f"cell_radius must be positive, got {self.cell_radius}")


@dataclass(frozen=True)
class QuadratureControl:
    """Gauss-Legendre orders: 64 nodes per axis for 1-D averages, 128 for
    the 2-D uplink near-user case; both are doubled for the error estimate."""

    nodes_1d: int = 64
    nodes_2d: int = 128
    fading_nodes: int = 96
    abs_tol: float = 1e-6

    def __post_init__(self):
        if min(self.nodes_1d, self.nodes_2d, self.fading_nodes) < 2:
            raise ValueError("quadrature orders must be >= 2")
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")


@dataclass(frozen=True)
class PlacementAverage:
    probability: float
    error_estimate: float
    nodes_used: int


def pdf_rmin(pm: PlacementModel, r):
    """Density of the minimum of n_users disk-uniform radii; 0 outside [0, R]."""
    r = np.asarray(r, dtype=float)
    n, radius = pm.n_users, pm.cell_radius
    inside = (r >= 0.0) & (r <= radius)
    rr = np.where(inside, r, 0.0)
    out_ = np.where(inside, n * (1.0 - rr**2 / radius**2) ** (n - 1) * 2.0 * rr / radius**2, 0.0)
    return float(out_) if out_.ndim == 0 else out_


def pdf_rmax(pm: PlacementModel, r):
    """Density of the maximum of n_users disk-uniform radii; 0 outside [0, R]."""
    r = np.asarray(r, dtype=float)
    n, radius = pm.n_users, pm.cell_radius
    inside = (r >= 0.0) & (r <= radius)
    rr = np.where(inside, r, 0.0)
    out_ = np.where(inside, n * (rr**2 / radius**2) ** (n - 1) * 2.0 * rr / radius**2, 0.0)
    return float(out_) if out_.ndim == 0 else out_


def _gl_nodes(hi: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * hi * (x + 1.0), 0.5 * hi * w


def _gains(scn: LinkScenario, r: np.ndarray) -> np.ndarray:
    if scn.domain == TERRESTRIAL:
        return terrestrial_gain(scn.env, np.maximum(r, 1e-12))
    return aerial_gain(scn.env, scn.h, r)


def _outage_profile_1d(scn: LinkScenario, user: int, r: np.ndarray) -> np.ndarray:
    """Vectorized single-radius outage P_out(r) for the CDF-form operations."""
    spec = scn.fading_spec(user)
    g = _gains(scn, r)
    snr_th = 2.0 ** scn.r_th - 1.0
    if scn.scheme == OMA:
        power = scn.p_total if scn.direction == DOWNLINK else (scn.p1 if user == 1 else scn.p2)
        thresholds = (2.0 ** (2.0 * scn.r_th) - 1.0) / (power * g)
    elif scn.direction == DOWNLINK and user == 1:
        thresholds = snr_th / (scn.a1 * scn.p_total * g)
    elif scn.direction == DOWNLINK:
        feasibility = scn.a2 - snr_th * scn.a1
        if feasibility <= 0.0:
            return np.ones_like(g)
        thresholds = (snr_th / (scn.p_total * g)) / feasibility
    else:  # uplink far user
        thresholds = snr_th / (scn.p2 * g)
    return fad.cdf(spec, thresholds)


def _near_event_grid(
    scn: LinkScenario, g1: np.ndarray, g2: np.ndarray, quad: QuadratureControl
) -> np.ndarray:
    """P{X1 < slope*X2 + offset} over a (r1, r2) node grid, vectorized.

    Fixed-order Gauss-Legendre in the far-user fading variable; the
    near-user CDF is evaluated on the full tensor in chunks.
    """
    snr_th = 2.0 ** scn.r_th - 1.0
    slope = snr_th * scn.p2 * g2[None, :] / (scn.p1 * g1[:, None])
    offset = snr_th / (scn.p1 * g1)
    x_hi = fad.upper_quantile(scn.fading2, 1e-12)
    x, wx = _gl_nodes(x_hi, quad.fading_nodes)
    weights = wx * fad.pdf(scn.fading2, x)

    n1 = g1.size
    result = np.empty((n1, g2.size))
    chunk = max(1, int(2e6) // (g2.size * x.size))
    for lo in range(0, n1, chunk):
        hi = min(lo + chunk, n1)
        args = slope[lo:hi, :, None] * x[None, None, :] + offset[lo:hi, None, None]
        cdf_vals = fad.cdf(scn.fading1, args)
        result[lo:hi] = np.einsum("ijk,k->ij", cdf_vals, weights)
    return np.clip(result, 0.0, 1.0)


def _near_event_grid_terrestrial(scn: LinkScenario, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    snr_th = 2.0 ** scn.r_th - 1.0
    lam1, lam2 = scn.fading1.lam, scn.fading2.lam
    slope = snr_th * scn.p2 * g2[None, :] / (scn.p1 * g1[:, None])
    offset = snr_th / (scn.p1 * g1)
    return 1.0 - lam2 * np.exp(-offset[:, None] * lam1) / (lam2 + slope * lam1)


def _near_event_grid_series(
    scn: LinkScenario, g1: np.ndarray, g2: np.ndarray, ctl: SeriesControl
) -> np.ndarray:
    snr_th = 2.0 ** scn.r_th - 1.0
    result = np.empty((g1.size, g2.size))
    for i, gi in enumerate(g1):
        for j, gj in enumerate(g2):
            slope = snr_th * scn.p2 * gj / (scn.p1 * gi)
            offset = snr_th / (scn.p1 * gi)
            result[i, j] = out.interference_outage_series(
                slope, offset, scn.fading1, scn.fading2, ctl
            ).probability
    return result


def _average_1d(pm: PlacementModel, scn: LinkScenario, user: int, n_nodes: int) -> float:
    r, w = _gl_nodes(pm.cell_radius, n_nodes)
    density = pdf_rmin(pm, r) if user == 1 else pdf_rmax(pm, r)
    return float(np.sum(w * density * _outage_profile_1d(scn, user, r)))


def _average_2d(
    pm: PlacementModel, scn: LinkScenario, n_nodes: int, quad: QuadratureControl, engine: str
) -> float:
    r, w = _gl_nodes(pm.cell_radius, n_nodes)
    w_min = w * pdf_rmin(pm, r)
    w_max = w * pdf_rmax(pm, r)
    g1, g2 = _gains(scn, r), _gains(scn, r)
    if scn.domain == TERRESTRIAL:
        grid = _near_event_grid_terrestrial(scn, g1, g2)
    elif engine == "series":
        grid = _near_event_grid_series(scn, g1, g2, SeriesControl())
    else:
        grid = _near_event_grid(scn, g1, g2, quad)
    return float(w_min @ grid @ w_max)


def expected_outage(
    pm: PlacementModel,
    scn: LinkScenario,
    user: int,
    quad: QuadratureControl | None = None,
    engine: str = "auto",
) -> PlacementAverage:
    """Placement-averaged outage for the scenario's operation and user.

    Single-radius operations integrate P_out(r) against the near- or
    far-user order-statistics density; the uplink NOMA near user needs
    both radii and uses the tensor-product rule with the independence
    approximation f(r1, r2) ~ f(r1) f(r2). The returned error estimate is
    the change when every axis order is doubled; exceeding ``abs_tol``
    raises QuadratureError.

    engine: "auto" (closed forms / vectorized fading quadrature),
    "series" (per-node double series for the aerial uplink near user;
    slow, for cross-checks).
    """
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")
    if engine not in ("auto", "series"):
        raise ValueError(f"engine must be auto|series, got {engine!r}")
    quad = quad or QuadratureControl()
    if scn.r_th == 0.0:
        return PlacementAverage(0.0, 0.0, 0)

    two_dim = scn.scheme == NOMA and scn.direction == UPLINK and user == 1
    if two_dim:
        base = quad.nodes_2d
        coarse = _average_2d(pm, scn, base, quad, engine)
        fine = _average_2d(pm, scn, 2 * base, quad, engine)
    else:
        base = quad.nodes_1d
        coarse = _average_1d(pm, scn, user, base)
        fine = _average_1d(pm, scn, user, 2 * base)

    err = abs(fine - coarse)
    if err > quad.abs_tol:
        raise QuadratureError(
            f"placement quadrature did not settle: |change on doubling| = {err:.3e} "
            f"> abs_tol = {quad.abs_tol:.3e}",
            residual=err,
        )
    return PlacementAverage(min(1.0, max(0.0, fine)), err, 2 * base)
