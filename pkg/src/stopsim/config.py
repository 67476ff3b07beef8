"""Scenario configuration: defaults, validation, and the key=value file format.

A scenario file is human-editable text, one ``key = value`` per line with
``#`` comments.  Unknown keys are rejected, omitted keys fall back to the
defaults below, and the fully resolved configuration can be rendered back to
the same format (and re-parsed to an identical object) for echoing next to
simulation outputs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from stopsim.demand import DemandConfig
from stopsim.geometry import (
    CRUISE_SPEED_MPS,
    DEFAULT_AREA_HEIGHT_M,
    DEFAULT_AREA_WIDTH_M,
    WALK_SPEED_MPS,
    ConfigError,
    GridWorld,
    StopLattice,
    build_stop_lattice,
)
from stopsim.scheduling import KinematicsConfig

DEFAULT_SWEEP_SPACINGS_M = (80.0, 200.0, 430.0, 640.0, 860.0)
DEFAULT_SWEEP_FLEETS = (500, 1000)
DEFAULT_SWEEP_RATES = (20.0, 40.0, 80.0, 160.0, 320.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Every knob of one simulation plus the sweep axes of an experiment."""

    # world geometry
    area_width_m: float = DEFAULT_AREA_WIDTH_M
    area_height_m: float = DEFAULT_AREA_HEIGHT_M
    ew_road_spacing_m: float = 80.0
    ns_road_spacing_m: float = 200.0
    walk_speed_mps: float = WALK_SPEED_MPS
    cruise_speed_mps: float = CRUISE_SPEED_MPS

    # demand process
    rate_per_h_km2: float = 320.0
    walk_threshold_m: float = 1600.0
    duration_s: float = 4 * 3600.0
    delta_t_s: float = 1200.0

    # vehicle kinematics
    boarding_s: float = 5.0
    alighting_s: float = 10.0
    stop_loss_s: float = 11.5
    capacity: int = 45

    # scenario
    fleet_size: int = 1000
    stop_spacing_m: float = 80.0
    seed: int = 0
    drain_cap_s: float = 2 * 3600.0
    verify_assignments: bool = True

    # sweep axes
    sweep_spacings_m: tuple[float, ...] = DEFAULT_SWEEP_SPACINGS_M
    sweep_fleets: tuple[int, ...] = DEFAULT_SWEEP_FLEETS
    sweep_rates_per_h_km2: tuple[float, ...] = DEFAULT_SWEEP_RATES
    seeds_per_cell: int = 5

    def validate(self) -> None:
        if self.fleet_size < 1:
            raise ConfigError(f"fleet_size must be at least 1, got {self.fleet_size}")
        if self.capacity < 1:
            raise ConfigError(f"capacity must be at least 1, got {self.capacity}")
        if not self.delta_t_s > 0:
            raise ConfigError(f"delta_t_s must be positive, got {self.delta_t_s}")
        if self.drain_cap_s < 0:
            raise ConfigError(f"drain_cap_s must be non-negative, got {self.drain_cap_s}")
        if self.seeds_per_cell < 1:
            raise ConfigError(f"seeds_per_cell must be at least 1, got {self.seeds_per_cell}")
        for axis in ("sweep_spacings_m", "sweep_fleets", "sweep_rates_per_h_km2"):
            if not getattr(self, axis):
                raise ConfigError(f"sweep axis {axis} must not be empty")
        # constructing the parts validates the remaining fields
        world = self.world()
        build_stop_lattice(world, self.stop_spacing_m)
        self.kinematics()
        self.demand_config()

    def world(self) -> GridWorld:
        return GridWorld(
            area_width=self.area_width_m,
            area_height=self.area_height_m,
            ew_road_spacing=self.ew_road_spacing_m,
            ns_road_spacing=self.ns_road_spacing_m,
            walk_speed=self.walk_speed_mps,
            cruise_speed=self.cruise_speed_mps,
        )

    def lattice(self) -> StopLattice:
        return build_stop_lattice(self.world(), self.stop_spacing_m)

    def kinematics(self) -> KinematicsConfig:
        return KinematicsConfig(
            boarding_time=self.boarding_s,
            alighting_time=self.alighting_s,
            stop_loss=self.stop_loss_s,
            capacity=self.capacity,
        )

    def demand_config(self) -> DemandConfig:
        return DemandConfig(
            rate=self.rate_per_h_km2,
            walk_threshold=self.walk_threshold_m,
            duration=self.duration_s,
            seed=self.seed,
            max_extra_time=self.delta_t_s,
        )

    def cell(self, spacing: float, fleet: int, rate: float, seed: int) -> "ScenarioConfig":
        """The scenario of one sweep cell: scalar overrides, same everything else."""
        return dataclasses.replace(
            self, stop_spacing_m=spacing, fleet_size=fleet, rate_per_h_km2=rate, seed=seed
        )


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_TUPLE_FIELDS = {
    "sweep_spacings_m": float,
    "sweep_fleets": int,
    "sweep_rates_per_h_km2": float,
}


def _parse_value(key: str, raw: str, line_no: int):
    field = _FIELDS[key]
    try:
        if key in _TUPLE_FIELDS:
            elem = _TUPLE_FIELDS[key]
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            return tuple(elem(p) for p in parts)
        if field.type in ("bool", bool):
            low = raw.strip().lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if field.type in ("int", int):
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: invalid value for {key!r}: {exc}") from None


def parse_config_text(text: str, source: str = "<config>") -> ScenarioConfig:
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}: line {line_no}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"{source}: line {line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}: line {line_no}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, line_no)
    config = ScenarioConfig(**values)
    config.validate()
    return config


def parse_config(path) -> ScenarioConfig:
    """Read and validate a scenario file; see the module docstring for the format."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), source=str(path))


def format_config(config: ScenarioConfig) -> str:
    """Render the fully resolved configuration; parses back to an equal object."""
    lines = []
    for name, field in _FIELDS.items():
        value = getattr(config, name)
        if name in _TUPLE_FIELDS:
            rendered = ", ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{name} = {rendered}")
    return "\n".join(lines) + "\n"
