"""JSON run-configuration schema for the command-line harness.

Field names carry explicit units. A single file describes the propagation
environment, the noise normalization, the user-placement model, a scenario
template, and either a sweep block or a validation block. Parsing is
strict: unknown keys and malformed values raise ConfigError naming the
offending field path.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .channel import EnvironmentParams
from .fading import FadingSpec
from .outage import AERIAL, DOWNLINK, NOMA, OMA, TERRESTRIAL, UPLINK, LinkScenario
from .placement import PlacementModel

SWEEP_VARIABLES = ("target_rate", "altitude", "power_split", "user_power", "rice_k")
ENGINES = ("analytic", "monte_carlo", "both")


class ConfigError(ValueError):
    """Malformed configuration; the message names the field."""


@dataclass(frozen=True)
class NoiseConfig:
    psd_w_per_hz: float = 1e-10
    bandwidth_hz: float = 1e6

    @property
    def noise_power_w(self) -> float:
        return self.psd_w_per_hz * self.bandwidth_hz


@dataclass(frozen=True)
class PlacementConfig:
    n_users: int = 100
    cell_radius_m: float = 500.0
    averaged: bool = True

    def model(self) -> PlacementModel:
        return PlacementModel(self.n_users, self.cell_radius_m)


@dataclass(frozen=True)
class ScenarioConfig:
    direction: str = DOWNLINK
    domain: str = AERIAL
    altitude_m: float = 1500.0
    r1_m: float = 0.0
    r2_m: float = 0.0
    target_rate_bps_hz: float = 1.0
    total_power_w: float | None = 5.0
    power_split_a1: float | None = 0.1
    user1_power_w: float | None = None
    user2_power_w: float | None = None
    rice_k_1: float = 10.0
    omega_1: float = 1.0
    rice_k_2: float = 10.0
    omega_2: float = 1.0
    rayleigh_lambda_1: float = 1.0
    rayleigh_lambda_2: float = 1.0


@dataclass(frozen=True)
class OutputSpec:
    scheme: str
    direction: str
    domain: str
    user: int


@dataclass(frozen=True)
class SweepConfig:
    variable: str
    start: float
    stop: float
    steps: int
    outputs: tuple[OutputSpec, ...]
    engine: str = "analytic"


@dataclass(frozen=True)
class ValidateConfig:
    rice_k_near: float = 10.0
    omega_near: float = 1.0
    rice_k_far: float = 10.0
    omega_far: float = 1.0
    alpha1: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0, 1.5, 2.0)
    alpha2: tuple[float, ...] = (0.1, 0.5, 1.0)
    tolerance_abs: float = 5e-3
    se_multiple: float = 4.0


@dataclass(frozen=True)
class McSettings:
    n_samples: int = 10**6
    base_seed: int = 0
    n_workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    environment: EnvironmentParams = field(default_factory=EnvironmentParams)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    placement: PlacementConfig = field(default_factory=PlacementConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    sweep: SweepConfig | None = None
    validate: ValidateConfig | None = None
    mc: McSettings = field(default_factory=McSettings)


_MISSING = object()


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected an object, got {type(value).__name__}")
    return dict(value)


def _pop(section: dict, path: str, key: str, kind, default=_MISSING):
    if key not in section:
        if default is _MISSING:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    value = section.pop(key)
    if value is None:
        return None
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is bool and isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    if kind is list and isinstance(value, list):
        return value
    raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {value!r}")


def _reject_unknown(section: dict, path: str) -> None:
    if section:
        raise ConfigError(f"{path}.{sorted(section)[0]}: unknown field")


def _parse_environment(raw: dict) -> EnvironmentParams:
    sec = _section(raw, "environment")
    kwargs = {}
    for key in ("fc_hz", "alpha_t", "eta_t_db", "eta_los_db", "eta_nlos_db",
                "plos_a", "plos_b_per_deg", "c_m_s"):
        value = _pop(sec, "environment", key, float, default=None)
        if value is not None:
            kwargs[key] = value
    _reject_unknown(sec, "environment")
    try:
        return EnvironmentParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"environment: {exc}") from exc


def _parse_noise(raw: dict) -> NoiseConfig:
    sec = _section(raw, "noise")
    cfg = NoiseConfig(
        psd_w_per_hz=_pop(sec, "noise", "psd_w_per_hz", float, default=1e-10),
        bandwidth_hz=_pop(sec, "noise", "bandwidth_hz", float, default=1e6),
    )
    _reject_unknown(sec, "noise")
    if cfg.psd_w_per_hz <= 0.0:
        raise ConfigError("noise.psd_w_per_hz: must be positive")
    if cfg.bandwidth_hz <= 0.0:
        raise ConfigError("noise.bandwidth_hz: must be positive")
    return cfg


def _parse_placement(raw: dict) -> PlacementConfig:
    sec = _section(raw, "placement")
    cfg = PlacementConfig(
        n_users=_pop(sec, "placement", "n_users", int, default=100),
        cell_radius_m=_pop(sec, "placement", "cell_radius_m", float, default=500.0),
        averaged=_pop(sec, "placement", "averaged", bool, default=True),
    )
    _reject_unknown(sec, "placement")
    if cfg.n_users < 2:
        raise ConfigError("placement.n_users: must be >= 2")
    if cfg.cell_radius_m <= 0.0:
        raise ConfigError("placement.cell_radius_m: must be positive")
    return cfg


def _parse_scenario(raw: dict) -> ScenarioConfig:
    sec = _section(raw, "scenario")
    cfg = ScenarioConfig(
        direction=_pop(sec, "scenario", "direction", str, default=DOWNLINK),
        domain=_pop(sec, "scenario", "domain", str, default=AERIAL),
        altitude_m=_pop(sec, "scenario", "altitude_m", float, default=1500.0),
        r1_m=_pop(sec, "scenario", "r1_m", float, default=0.0),
        r2_m=_pop(sec, "scenario", "r2_m", float, default=0.0),
        target_rate_bps_hz=_pop(sec, "scenario", "target_rate_bps_hz", float, default=1.0),
        total_power_w=_pop(sec, "scenario", "total_power_w", float, default=5.0),
        power_split_a1=_pop(sec, "scenario", "power_split_a1", float, default=0.1),
        user1_power_w=_pop(sec, "scenario", "user1_power_w", float, default=None),
        user2_power_w=_pop(sec, "scenario", "user2_power_w", float, default=None),
        rice_k_1=_pop(sec, "scenario", "rice_k_1", float, default=10.0),
        omega_1=_pop(sec, "scenario", "omega_1", float, default=1.0),
        rice_k_2=_pop(sec, "scenario", "rice_k_2", float, default=10.0),
        omega_2=_pop(sec, "scenario", "omega_2", float, default=1.0),
        rayleigh_lambda_1=_pop(sec, "scenario", "rayleigh_lambda_1", float, default=1.0),
        rayleigh_lambda_2=_pop(sec, "scenario", "rayleigh_lambda_2", float, default=1.0),
    )
    _reject_unknown(sec, "scenario")
    if cfg.direction not in (UPLINK, DOWNLINK):
        raise ConfigError(f"scenario.direction: must be uplink|downlink, got {cfg.direction!r}")
    if cfg.domain not in (TERRESTRIAL, AERIAL):
        raise ConfigError(f"scenario.domain: must be terrestrial|aerial, got {cfg.domain!r}")
    if cfg.target_rate_bps_hz < 0.0:
        raise ConfigError("scenario.target_rate_bps_hz: must be >= 0")
    return cfg


def _parse_output(entry, index: int) -> OutputSpec:
    path = f"sweep.outputs[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{path}: expected an object")
    sec = dict(entry)
    spec = OutputSpec(
        scheme=_pop(sec, path, "scheme", str),
        direction=_pop(sec, path, "direction", str),
        domain=_pop(sec, path, "domain", str),
        user=_pop(sec, path, "user", int),
    )
    _reject_unknown(sec, path)
    if spec.scheme not in (NOMA, OMA):
        raise ConfigError(f"{path}.scheme: must be noma|oma, got {spec.scheme!r}")
    if spec.direction not in (UPLINK, DOWNLINK):
        raise ConfigError(f"{path}.direction: must be uplink|downlink")
    if spec.domain not in (TERRESTRIAL, AERIAL):
        raise ConfigError(f"{path}.domain: must be terrestrial|aerial")
    if spec.user not in (1, 2):
        raise ConfigError(f"{path}.user: must be 1 or 2")
    return spec


def _parse_sweep(raw: dict) -> SweepConfig | None:
    if "sweep" not in raw:
        return None
    sec = _section(raw, "sweep")
    outputs_raw = _pop(sec, "sweep", "outputs", list)
    outputs = tuple(_parse_output(entry, i) for i, entry in enumerate(outputs_raw))
    cfg = SweepConfig(
        variable=_pop(sec, "sweep", "variable", str),
        start=_pop(sec, "sweep", "start", float),
        stop=_pop(sec, "sweep", "stop", float),
        steps=_pop(sec, "sweep", "steps", int),
        outputs=outputs,
        engine=_pop(sec, "sweep", "engine", str, default="analytic"),
    )
    _reject_unknown(sec, "sweep")
    if cfg.variable not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep.variable: must be one of {SWEEP_VARIABLES}, got {cfg.variable!r}")
    if cfg.steps < 2:
        raise ConfigError("sweep.steps: must be >= 2")
    if cfg.engine not in ENGINES:
        raise ConfigError(f"sweep.engine: must be one of {ENGINES}, got {cfg.engine!r}")
    if not outputs:
        raise ConfigError("sweep.outputs: must list at least one output tuple")
    _check_sweep_domain(cfg)
    return cfg


def _check_sweep_domain(cfg: SweepConfig) -> None:
    if cfg.variable == "altitude":
        if cfg.start <= 0.0:
            raise ConfigError("sweep.start: altitude sweep requires start > 0")
        for i, spec in enumerate(cfg.outputs):
            if spec.domain == TERRESTRIAL:
                raise ConfigError(
                    f"sweep.outputs[{i}].domain: terrestrial outputs cannot join an altitude sweep"
                )
    if cfg.variable == "power_split" and not (0.0 < cfg.start < 1.0 and 0.0 < cfg.stop < 1.0):
        raise ConfigError("sweep.start: power_split sweep requires values in (0, 1)")
    if cfg.variable in ("user_power", "target_rate", "rice_k") and cfg.start < 0.0:
        raise ConfigError(f"sweep.start: {cfg.variable} sweep requires start >= 0")


def _parse_validate(raw: dict) -> ValidateConfig | None:
    if "validate" not in raw:
        return None
    sec = _section(raw, "validate")
    alpha1 = _pop(sec, "validate", "alpha1", list, default=[0.1, 0.25, 0.5, 1.0, 1.5, 2.0])
    alpha2 = _pop(sec, "validate", "alpha2", list, default=[0.1, 0.5, 1.0])
    cfg = ValidateConfig(
        rice_k_near=_pop(sec, "validate", "rice_k_near", float, default=10.0),
        omega_near=_pop(sec, "validate", "omega_near", float, default=1.0),
        rice_k_far=_pop(sec, "validate", "rice_k_far", float, default=10.0),
        omega_far=_pop(sec, "validate", "omega_far", float, default=1.0),
        alpha1=tuple(float(v) for v in alpha1),
        alpha2=tuple(float(v) for v in alpha2),
        tolerance_abs=_pop(sec, "validate", "tolerance_abs", float, default=5e-3),
        se_multiple=_pop(sec, "validate", "se_multiple", float, default=4.0),
    )
    _reject_unknown(sec, "validate")
    if any(v < 0.0 for v in cfg.alpha1 + cfg.alpha2):
        raise ConfigError("validate.alpha1/alpha2: values must be >= 0")
    if cfg.tolerance_abs <= 0.0:
        raise ConfigError("validate.tolerance_abs: must be positive")
    return cfg


def _parse_mc(raw: dict) -> McSettings:
    sec = _section(raw, "mc")
    cfg = McSettings(
        n_samples=_pop(sec, "mc", "n_samples", int, default=10**6),
        base_seed=_pop(sec, "mc", "base_seed", int, default=0),
        n_workers=_pop(sec, "mc", "n_workers", int, default=1),
    )
    _reject_unknown(sec, "mc")
    if cfg.n_samples < 1:
        raise ConfigError("mc.n_samples: must be >= 1")
    if cfg.n_workers < 1:
        raise ConfigError("mc.n_workers: must be >= 1")
    return cfg


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")
    known = {"environment", "noise", "placement", "scenario", "sweep", "validate", "mc"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown top-level section")
    return RunConfig(
        environment=_parse_environment(raw),
        noise=_parse_noise(raw),
        placement=_parse_placement(raw),
        scenario=_parse_scenario(raw),
        sweep=_parse_sweep(raw),
        validate=_parse_validate(raw),
        mc=_parse_mc(raw),
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(raw)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {
        "environment": asdict(cfg.environment),
        "noise": asdict(cfg.noise),
        "placement": asdict(cfg.placement),
        "scenario": asdict(cfg.scenario),
        "mc": asdict(cfg.mc),
    }
    if cfg.sweep is not None:
        sweep = asdict(cfg.sweep)
        sweep["outputs"] = [asdict(o) for o in cfg.sweep.outputs]
        out["sweep"] = sweep
    if cfg.validate is not None:
        validate = asdict(cfg.validate)
        validate["alpha1"] = list(cfg.validate.alpha1)
        validate["alpha2"] = list(cfg.validate.alpha2)
        out["validate"] = validate
    return out


def dump_config(cfg: RunConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")


def build_scenario(
    cfg: RunConfig,
    direction: str,
    domain: str,
    scheme: str,
    scenario: ScenarioConfig | None = None,
) -> LinkScenario:
    """Materialize one LinkScenario from the configuration template.

    Transmit powers in watts are normalized by psd * bandwidth; fading
    specs follow the domain (Rayleigh terrestrial, Rician aerial).
    """
    sc = scenario or cfg.scenario
    noise_w = cfg.noise.noise_power_w
    if domain == TERRESTRIAL:
        h = 0.0
        fading1 = FadingSpec.rayleigh(sc.rayleigh_lambda_1)
        fading2 = FadingSpec.rayleigh(sc.rayleigh_lambda_2)
    else:
        h = sc.altitude_m
        fading1 = FadingSpec.rician(sc.rice_k_1, sc.omega_1)
        fading2 = FadingSpec.rician(sc.rice_k_2, sc.omega_2)

    kwargs = dict(
        direction=direction,
        domain=domain,
        scheme=scheme,
        env=cfg.environment,
        h=h,
        r1=sc.r1_m,
        r2=sc.r2_m,
        r_th=sc.target_rate_bps_hz,
        fading1=fading1,
        fading2=fading2,
    )
    if direction == DOWNLINK:
        if sc.total_power_w is None or sc.total_power_w <= 0.0:
            raise ConfigError("scenario.total_power_w: required (> 0) for downlink outputs")
        kwargs["p_total"] = sc.total_power_w / noise_w
        if scheme == NOMA:
            if sc.power_split_a1 is None:
                raise ConfigError("scenario.power_split_a1: required for downlink NOMA outputs")
            kwargs["a1"] = sc.power_split_a1
    else:
        p1_w = sc.user1_power_w
        p2_w = sc.user2_power_w
        if p1_w is None or p2_w is None:
            raise ConfigError("scenario.user1_power_w/user2_power_w: required for uplink outputs")
        kwargs["p1"] = p1_w / noise_w
        kwargs["p2"] = p2_w / noise_w
    try:
        return LinkScenario(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from exc
