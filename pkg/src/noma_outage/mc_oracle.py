"""Seedable Monte-Carlo estimator of every outage probability.

Estimates are formed directly from the spectral-efficiency definitions
(fading draw -> capacity -> compare against the rate threshold), so they
are independent of the closed forms they validate.

Determinism: samples are partitioned into fixed blocks of 2^16; block b
always uses the Philox stream jumped b times from the base seed and draws
its arrays in a fixed order. Worker processes only decide who evaluates a
block, never what the block contains, so the estimate is bit-identical
for a given (scenario, base_seed, n_samples) at any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fading as fad
from .channel import aerial_gain, terrestrial_gain
from .fading import FadingSpec
from .outage import DOWNLINK, MONTE_CARLO, NOMA, OMA, TERRESTRIAL, LinkScenario, OutageResult

BLOCK_SAMPLES = 1 << 16


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 10**6
    base_seed: int = 0
    n_workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.n_workers < 1:
            raise ValueError(f"n_workers must be >= 1, got {self.n_workers}")


def _block_rng(base_seed: int, block_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(base_seed).jumped(block_index))


def _block_sizes(n_samples: int) -> list[int]:
    full, rest = divmod(n_samples, BLOCK_SAMPLES)
    return [BLOCK_SAMPLES] * full + ([rest] if rest else [])


def _capacity(scn: LinkScenario, user: int, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Per-sample spectral efficiency for the scenario's capacity equation."""
    g1, g2 = scn.gain(1), scn.gain(2)
    return _capacity_from_gains(scn, user, g1, g2, x1, x2)


def _capacity_from_gains(scn, user, g1, g2, x1, x2):
    if scn.scheme == OMA:
        power = scn.p_total if scn.direction == DOWNLINK else (scn.p1 if user == 1 else scn.p2)
        gain = g1 if user == 1 else g2
        x = x1 if user == 1 else x2
        return 0.5 * np.log2(1.0 + power * gain * x)
    if scn.direction == DOWNLINK:
        if user == 1:
            return np.log2(1.0 + scn.a1 * scn.p_total * g1 * x1)
        signal = scn.a2 * scn.p_total * g2 * x2
        interference = scn.a1 * scn.p_total * g2 * x2
        return np.log2(1.0 + signal / (interference + 1.0))
    if user == 1:
        return np.log2(1.0 + scn.p1 * g1 * x1 / (scn.p2 * g2 * x2 + 1.0))
    return np.log2(1.0 + scn.p2 * g2 * x2)


def _count_scenario_block(
    scn: LinkScenario, user: int, base_seed: int, block_index: int, size: int
) -> int:
    rng = _block_rng(base_seed, block_index)
    x1 = fad.sample(scn.fading1, rng, size)
    x2 = fad.sample(scn.fading2, rng, size)
    return int(np.count_nonzero(_capacity(scn, user, x1, x2) < scn.r_th))


def _count_alpha_block(
    slope: float,
    offset: float,
    near: FadingSpec,
    far: FadingSpec,
    base_seed: int,
    block_index: int,
    size: int,
) -> int:
    rng = _block_rng(base_seed, block_index)
    x_near = fad.sample(near, rng, size)
    x_far = fad.sample(far, rng, size)
    return int(np.count_nonzero(x_near < slope * x_far + offset))


def _count_placement_block(
    scn: LinkScenario, user: int, n_users: int, cell_radius: float,
    base_seed: int, block_index: int, size: int,
) -> int:
    rng = _block_rng(base_seed, block_index)
    r1, r2 = _sample_min_max_radii(rng, n_users, cell_radius, size)
    if scn.domain == TERRESTRIAL:
        g1 = terrestrial_gain(scn.env, np.maximum(r1, 1e-9))
        g2 = terrestrial_gain(scn.env, np.maximum(r2, 1e-9))
    else:
        g1 = aerial_gain(scn.env, scn.h, r1)
        g2 = aerial_gain(scn.env, scn.h, r2)
    x1 = fad.sample(scn.fading1, rng, size)
    x2 = fad.sample(scn.fading2, rng, size)
    cap = _capacity_from_gains(scn, user, g1, g2, x1, x2)
    return int(np.count_nonzero(cap < scn.r_th))


def _sample_min_max_radii(rng, n_users: int, cell_radius: float, size: int):
    """Joint draw of the minimum and maximum of n_users disk-uniform radii.

    The minimum comes from its marginal; the maximum is then the largest
    of the remaining n_users - 1 radii conditioned to lie above it, which
    needs one more uniform. Exact, so the min/max dependence is kept.
    """
    u = rng.random(size)
    v = rng.random(size)
    f_min = 1.0 - (1.0 - u) ** (1.0 / n_users)
    r_min = cell_radius * np.sqrt(f_min)
    f_max = f_min + (1.0 - f_min) * v ** (1.0 / (n_users - 1))
    r_max = cell_radius * np.sqrt(f_max)
    return r_min, r_max


def _run_blocks(counter, args: tuple, cfg: McConfig) -> OutageResult:
    sizes = _block_sizes(cfg.n_samples)
    jobs = [args + (cfg.base_seed, b, size) for b, size in enumerate(sizes)]
    if cfg.n_workers == 1 or len(jobs) == 1:
        counts = [counter(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.n_workers) as pool:
            counts = list(pool.map(counter, *zip(*jobs)))
    total = sum(counts)
    p = total / cfg.n_samples
    se = math.sqrt(p * (1.0 - p) / cfg.n_samples)
    return OutageResult(p, MONTE_CARLO, std_error=se)


def simulate_outage(scn: LinkScenario, user: int, cfg: McConfig) -> OutageResult:
    """Monte-Carlo outage estimate with binomial standard error."""
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")
    if scn.scheme == NOMA and scn.direction == DOWNLINK and user == 2 and scn.a1 is None:
        raise ValueError("downlink NOMA scenario requires a1")
    return _run_blocks(_count_scenario_block, (scn, user), cfg)


def simulate_alpha_event(
    slope: float, offset: float, near: FadingSpec, far: FadingSpec, cfg: McConfig
) -> OutageResult:
    """Monte-Carlo estimate of P{X_near < slope*X_far + offset}."""
    if slope < 0.0 or offset < 0.0:
        raise ValueError("slope and offset must be >= 0")
    return _run_blocks(_count_alpha_block, (slope, offset, near, far), cfg)


def simulate_outage_random_positions(
    scn: LinkScenario, user: int, n_users: int, cell_radius: float, cfg: McConfig
) -> OutageResult:
    """Outage averaged over random user placement as well as fading.

    Each sample draws a fresh (minimum, maximum) pair of user radii from
    the exact joint order-statistics law of n_users disk-uniform users,
    rebuilds the channel gains, then draws fading. This quantifies the
    error of the product-density approximation used by the analytic
    placement average.
    """
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")
    if n_users < 2:
        raise ValueError(f"n_users must be >= 2, got {n_users}")
    if cell_radius <= 0.0:
        raise ValueError(f"cell_radius must be positive, got {cell_radius}")
    return _run_blocks(_count_placement_block, (scn, user, n_users, cell_radius), cfg)
