"""Command-line harness: closed-form/Monte-Carlo validation runs, figure
sweeps, and NOMA-gain tables, all emitted as deterministic CSV.

Exit codes: 0 success, 2 configuration error, 3 tolerance breach,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import outage as out
from .config import (
    ConfigError,
    OutputSpec,
    RunConfig,
    build_scenario,
    load_config,
)
from .fading import FadingSpec
from .mc_oracle import McConfig, simulate_alpha_event, simulate_outage, simulate_outage_random_positions
from .outage import NOMA, OMA
from .placement import QuadratureError, expected_outage
from .specfun import SeriesTruncationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_NUMERICAL = 4

SWEEP_COLUMNS = ("variable", "scenario", "user", "scheme", "analytic_p", "mc_p", "mc_se", "noma_gain")
VALIDATE_COLUMNS = ("alpha1", "alpha2", "analytic_p", "mc_p", "mc_se", "abs_diff")
GAIN_COLUMNS = ("scenario", "user", "oma_p", "noma_p", "noma_gain")


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".12g")


def _write_csv(path: str, columns, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _mc_config(cfg: RunConfig, args) -> McConfig:
    return McConfig(
        n_samples=args.samples if args.samples is not None else cfg.mc.n_samples,
        base_seed=args.seed if args.seed is not None else cfg.mc.base_seed,
        n_workers=args.workers if args.workers is not None else cfg.mc.n_workers,
    )


def cmd_validate(cfg: RunConfig, args) -> int:
    """Series evaluator vs Monte-Carlo on a grid of event coefficients."""
    vc = cfg.validate
    if vc is None:
        raise ConfigError("validate: section is required for the validate command")
    near = FadingSpec.rician(vc.rice_k_near, vc.omega_near)
    far = FadingSpec.rician(vc.rice_k_far, vc.omega_far)
    mc_cfg = _mc_config(cfg, args)

    rows = []
    breaches = []
    for a2 in vc.alpha2:
        for a1 in vc.alpha1:
            if a1 == 0.0 or a2 == 0.0:
                analytic = out.interference_outage_quadrature(a1, a2, near, far).probability
            else:
                analytic = out.interference_outage_series(a1, a2, near, far).probability
            est = simulate_alpha_event(a1, a2, near, far, mc_cfg)
            diff = abs(analytic - est.probability)
            rows.append([_fmt(a1), _fmt(a2), _fmt(analytic), _fmt(est.probability),
                         _fmt(est.std_error), _fmt(diff)])
            limit = max(vc.tolerance_abs, vc.se_multiple * est.std_error)
            if diff > limit:
                breaches.append((a1, a2, diff, limit))
    _write_csv(args.out, VALIDATE_COLUMNS, rows)
    if breaches:
        for a1, a2, diff, limit in breaches:
            print(
                f"tolerance breach at alpha1={a1:g} alpha2={a2:g}: "
                f"|analytic - mc| = {diff:.3e} > {limit:.3e}",
                file=sys.stderr,
            )
        return EXIT_TOLERANCE
    return EXIT_OK


def _analytic_point(cfg: RunConfig, spec: OutputSpec, scenario) -> float:
    scn = build_scenario(cfg, spec.direction, spec.domain, spec.scheme, scenario)
    if cfg.placement.averaged:
        return expected_outage(cfg.placement.model(), scn, spec.user).probability
    if spec.scheme == OMA:
        return out.oma_outage(scn, spec.user).probability
    return out.noma_outage(scn, spec.user).probability


def _mc_point(cfg: RunConfig, spec: OutputSpec, scenario, mc_cfg: McConfig):
    scn = build_scenario(cfg, spec.direction, spec.domain, spec.scheme, scenario)
    if cfg.placement.averaged:
        est = simulate_outage_random_positions(
            scn, spec.user, cfg.placement.n_users, cfg.placement.cell_radius_m, mc_cfg
        )
    else:
        est = simulate_outage(scn, spec.user, mc_cfg)
    return est.probability, est.std_error


def _scenario_at(cfg: RunConfig, variable: str, value: float):
    sc = cfg.scenario
    if variable == "target_rate":
        return dataclasses.replace(sc, target_rate_bps_hz=value)
    if variable == "altitude":
        return dataclasses.replace(sc, altitude_m=value)
    if variable == "power_split":
        return dataclasses.replace(sc, power_split_a1=value)
    if variable == "user_power":
        return dataclasses.replace(sc, user1_power_w=value, user2_power_w=value)
    if variable == "rice_k":
        return dataclasses.replace(sc, rice_k_1=value, rice_k_2=value)
    raise ConfigError(f"sweep.variable: unsupported variable {variable!r}")


def _sweep_point(cfg: RunConfig, value: float, mc_cfg: McConfig) -> list[list[str]]:
    sweep = cfg.sweep
    scenario = _scenario_at(cfg, sweep.variable, value)
    analytic: dict[OutputSpec, float] = {}
    mc_est: dict[OutputSpec, tuple[float, float]] = {}
    for spec in sweep.outputs:
        if sweep.engine in ("analytic", "both"):
            analytic[spec] = _analytic_point(cfg, spec, scenario)
        if sweep.engine in ("monte_carlo", "both"):
            mc_est[spec] = _mc_point(cfg, spec, scenario, mc_cfg)

    rows = []
    for spec in sweep.outputs:
        gain = None
        if spec.scheme == NOMA:
            partner = dataclasses.replace(spec, scheme=OMA)
            if partner in analytic and spec in analytic:
                gain = analytic[partner] - analytic[spec]
            elif partner in mc_est and spec in mc_est:
                gain = mc_est[partner][0] - mc_est[spec][0]
        mc_p, mc_se = mc_est.get(spec, (None, None))
        rows.append([
            _fmt(value),
            f"{spec.direction}-{spec.domain}",
            str(spec.user),
            spec.scheme,
            _fmt(analytic.get(spec)),
            _fmt(mc_p),
            _fmt(mc_se),
            _fmt(gain),
        ])
    return rows


def cmd_sweep(cfg: RunConfig, args) -> int:
    """One CSV row per sweep point per output tuple, in sweep order."""
    if cfg.sweep is None:
        raise ConfigError("sweep: section is required for the sweep command")
    mc_cfg = _mc_config(cfg, args)
    values = [float(v) for v in np.linspace(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.steps)]
    workers = args.workers if args.workers is not None else 1
    if workers > 1:
        # Rows are buffered and written in sweep order; Monte-Carlo work
        # inside each point stays single-process to avoid nested pools.
        point_cfg = McConfig(mc_cfg.n_samples, mc_cfg.base_seed, 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_point, *zip(*[(cfg, v, point_cfg) for v in values])))
    else:
        chunks = [_sweep_point(cfg, v, mc_cfg) for v in values]
    rows = [row for chunk in chunks for row in chunk]
    _write_csv(args.out, SWEEP_COLUMNS, rows)
    return EXIT_OK


def cmd_gain(cfg: RunConfig, args) -> int:
    """NOMA-vs-OMA gain table at the configured operating point."""
    if cfg.sweep is None or not cfg.sweep.outputs:
        raise ConfigError("sweep.outputs: output tuples are required for the gain command")
    rows = []
    seen = set()
    for spec in cfg.sweep.outputs:
        key = (spec.direction, spec.domain, spec.user)
        if key in seen:
            continue
        seen.add(key)
        oma_p = _analytic_point(cfg, dataclasses.replace(spec, scheme=OMA), cfg.scenario)
        noma_p = _analytic_point(cfg, dataclasses.replace(spec, scheme=NOMA), cfg.scenario)
        rows.append([
            f"{spec.direction}-{spec.domain}",
            str(spec.user),
            _fmt(oma_p),
            _fmt(noma_p),
            _fmt(oma_p - noma_p),
        ])
    _write_csv(args.out, GAIN_COLUMNS, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-outage",
        description="Two-user NOMA/OMA outage analysis for terrestrial and aerial links",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "check the series evaluator against Monte-Carlo on a coefficient grid"),
        ("sweep", "reproduce a parameter sweep as CSV"),
        ("gain", "emit a NOMA-gain table at the configured operating point"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON run configuration")
        cmd.add_argument("--out", required=True, help="output CSV path")
        cmd.add_argument("--engine", choices=("analytic", "mc", "both"), default=None,
                         help="override the configured sweep engine")
        cmd.add_argument("--samples", type=int, default=None, help="override mc.n_samples")
        cmd.add_argument("--seed", type=int, default=None, help="override mc.base_seed")
        cmd.add_argument("--workers", type=int, default=None, help="worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.engine is not None and cfg.sweep is not None:
            engine = {"mc": "monte_carlo"}.get(args.engine, args.engine)
            cfg = dataclasses.replace(cfg, sweep=dataclasses.replace(cfg.sweep, engine=engine))
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        if args.command == "validate":
            return cmd_validate(cfg, args)
        if args.command == "sweep":
            return cmd_sweep(cfg, args)
        return cmd_gain(cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SeriesTruncationError, QuadratureError) as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
