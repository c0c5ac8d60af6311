"""Scenario files: schema validation, defaults, and world construction.

A scenario is a UTF-8 JSON document with fixed field names; unknown fields
are rejected everywhere so typos fail loudly before a run starts. The full
schema with defaults is documented in SCENARIO.md; bundled scenarios live in
the skimwatch.scenarios package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .nav import NavGains, Waypoint, default_gains
from .world import (
    BotParams,
    PiecewiseLinearProfile,
    PowerState,
    TrashItem,
    WorldState,
    constant_profile,
)


class ScenarioError(ValueError):
    """Scenario file fails schema validation."""


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ScenarioError(f"{section}: unknown field(s) {sorted(unknown)}")


def _number(section: str, name: str, value, default=None):
    if value is None:
        return default
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ScenarioError(f"{section}.{name}: expected a finite number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class MissionConfig:
    waypoints: tuple[Waypoint, ...] = ()
    gains: NavGains | None = None
    auto_start: bool = True
    conveyor: str = "auto"          # "auto" | "on" | "off"
    collect_detours: bool = True
    sensor_range: float = 8.0
    sensor_fov: float = math.pi


@dataclass(frozen=True)
class RunConfig:
    duration_s: float = 300.0
    dt: float = 0.05
    telemetry_hz: float = 10.0
    heartbeat_hz: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "unnamed"
    seed: int = 0
    params: BotParams = field(default_factory=BotParams)
    pose: tuple[float, float, float] = (0.0, 0.0, 0.0)
    current: tuple[float, float] = (0.0, 0.0)
    battery_capacity_wh: float = 50.0
    soc_wh: float | None = None
    solar_peak_w: float = 3.0
    solar_profile: PiecewiseLinearProfile | None = None
    trash: tuple[TrashItem, ...] = ()
    mission: MissionConfig = field(default_factory=MissionConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def initial_power(self) -> PowerState:
        soc = self.battery_capacity_wh if self.soc_wh is None else self.soc_wh
        return PowerState(soc=soc, battery_capacity=self.battery_capacity_wh,
                          solar_peak=self.solar_peak_w)

    def initial_world(self) -> WorldState:
        return WorldState(x=self.pose[0], y=self.pose[1], heading=self.pose[2],
                          trash=self.trash, power=self.initial_power(),
                          current=self.current, rng_seed=self.seed)

    def solar(self) -> PiecewiseLinearProfile:
        return self.solar_profile or constant_profile(self.solar_peak_w)

    def nav_gains(self) -> NavGains:
        return self.mission.gains or default_gains(self.params)


def parse_scenario(data: dict, name: str = "unnamed") -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ScenarioError("scenario root must be an object")
    _check_keys("scenario", data, {"name", "seed", "bot", "pose", "current",
                                   "power", "trash", "mission", "run"})
    name = data.get("name", name)
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError("scenario.seed must be an integer")

    bot_data = data.get("bot", {})
    _check_keys("bot", bot_data, set(BotParams.__dataclass_fields__))
    try:
        params = BotParams(**{k: _number("bot", k, v) for k, v in bot_data.items()})
    except ValueError as exc:
        raise ScenarioError(f"bot: {exc}") from None

    pose_data = data.get("pose", {})
    _check_keys("pose", pose_data, {"x", "y", "heading"})
    pose = (_number("pose", "x", pose_data.get("x"), 0.0),
            _number("pose", "y", pose_data.get("y"), 0.0),
            _number("pose", "heading", pose_data.get("heading"), 0.0))

    current_data = data.get("current", [0.0, 0.0])
    if not (isinstance(current_data, list) and len(current_data) == 2):
        raise ScenarioError("current must be a [vx, vy] pair")
    current = (_number("current", "vx", current_data[0]),
               _number("current", "vy", current_data[1]))

    power_data = data.get("power", {})
    _check_keys("power", power_data,
                {"battery_capacity_wh", "soc_wh", "solar_peak_w", "solar_profile"})
    capacity = _number("power", "battery_capacity_wh",
                       power_data.get("battery_capacity_wh"), 50.0)
    soc = _number("power", "soc_wh", power_data.get("soc_wh"))
    peak = _number("power", "solar_peak_w", power_data.get("solar_peak_w"), 3.0)
    profile = None
    if "solar_profile" in power_data:
        points = power_data["solar_profile"]
        if not (isinstance(points, list) and
                all(isinstance(p, list) and len(p) == 2 for p in points)):
            raise ScenarioError("power.solar_profile must be a list of [t, watts] pairs")
        try:
            profile = PiecewiseLinearProfile([(float(t), float(w)) for t, w in points])
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"power.solar_profile: {exc}") from None

    trash_items = []
    for i, item in enumerate(data.get("trash", [])):
        _check_keys(f"trash[{i}]", item, {"id", "x", "y", "mass"})
        try:
            trash_items.append(TrashItem(id=int(item.get("id", i)),
                                         x=_number("trash", "x", item["x"]),
                                         y=_number("trash", "y", item["y"]),
                                         mass=_number("trash", "mass", item["mass"])))
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"trash[{i}]: {exc}") from None
    ids = [t.id for t in trash_items]
    if len(set(ids)) != len(ids):
        raise ScenarioError("trash ids must be unique")

    mission = _parse_mission(data.get("mission", {}), params)
    run = _parse_run(data.get("run", {}))

    return ScenarioConfig(name=name, seed=seed, params=params, pose=pose,
                          current=current, battery_capacity_wh=capacity,
                          soc_wh=soc, solar_peak_w=peak, solar_profile=profile,
                          trash=tuple(trash_items), mission=mission, run=run)


def _parse_mission(data: dict, params: BotParams) -> MissionConfig:
    _check_keys("mission", data, {"waypoints", "gains", "auto_start", "conveyor",
                                  "collect_detours", "sensor_range", "sensor_fov"})
    waypoints = []
    for i, wp in enumerate(data.get("waypoints", [])):
        _check_keys(f"mission.waypoints[{i}]", wp, {"x", "y", "radius"})
        try:
            waypoints.append(Waypoint(x=_number("waypoint", "x", wp["x"]),
                                      y=_number("waypoint", "y", wp["y"]),
                                      accept_radius=_number("waypoint", "radius",
                                                            wp.get("radius"), 3.0)))
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"mission.waypoints[{i}]: {exc}") from None

    gains = None
    if "gains" in data:
        gains_data = data["gains"]
        _check_keys("mission.gains", gains_data,
                    {"kp_heading", "kd_heading", "cruise_thrust", "slowdown_radius"})
        base = default_gains(params)
        try:
            gains = NavGains(
                kp_heading=_number("gains", "kp_heading", gains_data.get("kp_heading"),
                                   base.kp_heading),
                kd_heading=_number("gains", "kd_heading", gains_data.get("kd_heading"),
                                   base.kd_heading),
                cruise_thrust=_number("gains", "cruise_thrust",
                                      gains_data.get("cruise_thrust"), base.cruise_thrust),
                slowdown_radius=_number("gains", "slowdown_radius",
                                        gains_data.get("slowdown_radius"),
                                        base.slowdown_radius),
            )
        except ValueError as exc:
            raise ScenarioError(f"mission.gains: {exc}") from None
        if gains.cruise_thrust > params.max_thrust_per_side:
            raise ScenarioError("mission.gains.cruise_thrust exceeds max_thrust_per_side")

    conveyor = data.get("conveyor", "auto")
    if conveyor not in ("auto", "on", "off"):
        raise ScenarioError(f"mission.conveyor must be auto|on|off, got {conveyor!r}")
    auto_start = data.get("auto_start", True)
    detours = data.get("collect_detours", True)
    if not isinstance(auto_start, bool) or not isinstance(detours, bool):
        raise ScenarioError("mission.auto_start and collect_detours must be booleans")
    sensor_range = _number("mission", "sensor_range", data.get("sensor_range"), 8.0)
    sensor_fov = _number("mission", "sensor_fov", data.get("sensor_fov"), math.pi)
    if sensor_range <= 0 or not 0 < sensor_fov <= 2 * math.pi:
        raise ScenarioError("mission sensor bounds: range > 0, fov in (0, 2*pi]")

    return MissionConfig(waypoints=tuple(waypoints), gains=gains, auto_start=auto_start,
                         conveyor=conveyor, collect_detours=detours,
                         sensor_range=sensor_range, sensor_fov=sensor_fov)


def _parse_run(data: dict) -> RunConfig:
    _check_keys("run", data, {"duration_s", "dt", "telemetry_hz", "heartbeat_hz"})
    duration = _number("run", "duration_s", data.get("duration_s"), 300.0)
    dt = _number("run", "dt", data.get("dt"), 0.05)
    telemetry_hz = _number("run", "telemetry_hz", data.get("telemetry_hz"), 10.0)
    heartbeat_hz = _number("run", "heartbeat_hz", data.get("heartbeat_hz"), 1.0)
    if duration < 0:
        raise ScenarioError("run.duration_s must be non-negative")
    if not 0 < dt <= 0.5:
        raise ScenarioError("run.dt must be in (0, 0.5]")
    if telemetry_hz <= 0 or heartbeat_hz <= 0:
        raise ScenarioError("run rates must be positive")
    return RunConfig(duration_s=duration, dt=dt, telemetry_hz=telemetry_hz,
                     heartbeat_hz=heartbeat_hz)


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from None
    return parse_scenario(data, name=path.stem)


def bundled_scenario(name: str) -> ScenarioConfig:
    """Load a scenario shipped with the package (e.g. "square", "lawnmower")."""
    ref = resources.files("skimwatch.scenarios").joinpath(f"{name}.json")
    data = json.loads(ref.read_text(encoding="utf-8"))
    return parse_scenario(data, name=name)
