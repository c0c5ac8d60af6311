"""Discrete-time 2D world: twin-thruster surface bot, floating trash, solar power.

State objects are immutable values; every operation returns a new state.
Axes: x east, y north, heading in radians CCW from +x, wrapped to (-pi, pi].
The dynamics are 3-DOF (surge, yaw, planar position) with first-order drag,
integrated with semi-implicit Euler: velocities first, then pose from the
updated velocities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

TWO_PI = 2.0 * math.pi

# Belt speed limits, converted from 5-35 ft/min.
BELT_SPEED_MIN = 0.0254
BELT_SPEED_MAX = 0.1778


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = (a + math.pi) % TWO_PI - math.pi
    if a <= -math.pi:
        a += TWO_PI
    return a


def _require_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class BotParams:
    mass: float = 26.0                  # kg
    yaw_inertia: float = 5.0            # kg*m^2
    thruster_separation: float = 0.8    # m
    max_thrust_per_side: float = 12.0   # N
    surge_drag: float = 9.0             # N*s/m
    yaw_drag: float = 4.0               # N*m*s/rad
    intake_half_width: float = 0.3      # m
    intake_reach: float = 0.6           # m
    payload_capacity: float = 14.0      # kg
    belt_speed: float = 0.1016          # m/s (20 ft/min)
    electronics_load: float = 6.0       # W
    thruster_load_max: float = 60.0     # W at full thrust on both sides
    conveyor_load: float = 15.0         # W at BELT_SPEED_MAX

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"BotParams.{name} must be strictly positive, got {v!r}")
        if not (BELT_SPEED_MIN <= self.belt_speed <= BELT_SPEED_MAX):
            raise ValueError(
                f"belt_speed {self.belt_speed} outside [{BELT_SPEED_MIN}, {BELT_SPEED_MAX}] m/s"
            )


@dataclass(frozen=True)
class PowerState:
    soc: float = 50.0                # Wh
    battery_capacity: float = 50.0   # Wh
    solar_peak: float = 3.0          # W, panel output ceiling
    solar_input: float = 0.0         # W, last applied
    total_load: float = 0.0          # W, last applied
    dead: bool = False               # soc hit 0 on the last update

    def __post_init__(self) -> None:
        _require_finite(soc=self.soc, battery_capacity=self.battery_capacity,
                        solar_peak=self.solar_peak)
        if self.battery_capacity <= 0:
            raise ValueError("battery_capacity must be positive")
        if not 0.0 <= self.soc <= self.battery_capacity:
            raise ValueError(f"soc {self.soc} outside [0, {self.battery_capacity}]")
        if self.solar_peak < 0:
            raise ValueError("solar_peak must be non-negative")


@dataclass(frozen=True)
class TrashItem:
    id: int
    x: float
    y: float
    mass: float
    collected: bool = False

    def __post_init__(self) -> None:
        _require_finite(x=self.x, y=self.y, mass=self.mass)
        if self.mass <= 0:
            raise ValueError("trash mass must be positive")


@dataclass(frozen=True)
class ThrustCommand:
    left: float = 0.0   # N
    right: float = 0.0  # N

    def __post_init__(self) -> None:
        _require_finite(left=self.left, right=self.right)


@dataclass(frozen=True)
class WorldState:
    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    surge_speed: float = 0.0
    yaw_rate: float = 0.0
    trash: tuple[TrashItem, ...] = ()
    payload_kg: float = 0.0
    conveyor_on: bool = False
    power: PowerState = field(default_factory=PowerState)
    current: tuple[float, float] = (0.0, 0.0)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        _require_finite(t=self.t, x=self.x, y=self.y, heading=self.heading,
                        surge_speed=self.surge_speed, yaw_rate=self.yaw_rate,
                        current_x=self.current[0], current_y=self.current[1])
        if not -math.pi < self.heading <= math.pi:
            raise ValueError(f"heading {self.heading} outside (-pi, pi]")


def step(state: WorldState, cmd: ThrustCommand, params: BotParams, dt: float) -> WorldState:
    """Advance pose and velocities by one semi-implicit Euler step."""
    if not (math.isfinite(dt) and 0.0 < dt <= 0.5):
        raise ValueError(f"dt must be in (0, 0.5], got {dt!r}")
    left, right = cmd.left, cmd.right
    limit = params.max_thrust_per_side
    if abs(left) > limit or abs(right) > limit:
        raise ValueError(f"thrust ({left}, {right}) exceeds +/-{limit} N")
    if state.power.dead:
        left = right = 0.0

    force = left + right
    torque = (right - left) * params.thruster_separation / 2.0
    surge = state.surge_speed + dt * (force - params.surge_drag * state.surge_speed) / params.mass
    yaw_rate = state.yaw_rate + dt * (torque - params.yaw_drag * state.yaw_rate) / params.yaw_inertia
    heading = wrap_angle(state.heading + dt * yaw_rate)
    x = state.x + dt * (surge * math.cos(heading) + state.current[0])
    y = state.y + dt * (surge * math.sin(heading) + state.current[1])
    return replace(state, t=state.t + dt, x=x, y=y, heading=heading,
                   surge_speed=surge, yaw_rate=yaw_rate)


def update_power(power: PowerState, solar_w: float, loads: float, dt: float) -> PowerState:
    """Integrate battery state of charge over dt seconds.

    solar_w is the instantaneous panel output (clamped to [0, solar_peak]);
    loads the instantaneous draw in watts. soc is clamped to
    [0, battery_capacity]; hitting 0 sets the dead flag, which clears once
    solar charges the battery back above zero.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not math.isfinite(loads) or loads < 0:
        raise ValueError(f"loads must be non-negative, got {loads!r}")
    solar = min(max(solar_w, 0.0), power.solar_peak)
    soc = power.soc + (solar - loads) * dt / 3600.0
    soc = min(max(soc, 0.0), power.battery_capacity)
    return replace(power, soc=soc, solar_input=solar, total_load=loads,
                   dead=(soc <= 0.0))


def electrical_loads(params: BotParams, cmd: ThrustCommand, conveyor_on: bool) -> float:
    """Total draw in watts: electronics + thrusters + conveyor.

    Thruster draw scales with commanded thrust magnitude; conveyor draw scales
    linearly with belt speed (conveyor_load is the draw at BELT_SPEED_MAX).
    """
    thrust_frac = (abs(cmd.left) + abs(cmd.right)) / (2.0 * params.max_thrust_per_side)
    load = params.electronics_load + params.thruster_load_max * thrust_frac
    if conveyor_on:
        load += params.conveyor_load * params.belt_speed / BELT_SPEED_MAX
    return load


def _body_frame(state: WorldState, ix: float, iy: float) -> tuple[float, float]:
    dx, dy = ix - state.x, iy - state.y
    c, s = math.cos(state.heading), math.sin(state.heading)
    return c * dx + s * dy, -s * dx + c * dy


def collect_trash(state: WorldState, params: BotParams) -> tuple[WorldState, list[int]]:
    """Mark items inside the intake rectangle as collected.

    The intake is the bot-frame box [0, intake_reach] x [-w, +w] ahead of the
    bow. Items are taken in ascending distance order (ties by id); an item
    that would push the payload past capacity is skipped, not split.
    """
    if not state.conveyor_on or state.power.dead:
        return state, []

    candidates = []
    for item in state.trash:
        if item.collected:
            continue
        fwd, side = _body_frame(state, item.x, item.y)
        if 0.0 <= fwd <= params.intake_reach and abs(side) <= params.intake_half_width:
            candidates.append((math.hypot(item.x - state.x, item.y - state.y), item.id))
    candidates.sort()

    payload = state.payload_kg
    taken: list[int] = []
    by_id = {item.id: item for item in state.trash}
    for _, item_id in candidates:
        item = by_id[item_id]
        if payload + item.mass > params.payload_capacity:
            continue
        payload += item.mass
        taken.append(item_id)
        by_id[item_id] = replace(item, collected=True)
    if not taken:
        return state, []
    trash = tuple(by_id[item.id] for item in state.trash)
    return replace(state, trash=trash, payload_kg=payload), taken


def trash_sensor(state: WorldState, sensor_range: float, fov: float) -> list[tuple[float, float, int]]:
    """Proximity trash detections: (relative bearing, distance, id).

    Reports uncollected items within sensor_range whose bearing lies within
    +/- fov/2 of the heading, nearest first (ties by id).
    """
    if sensor_range <= 0:
        raise ValueError("sensor_range must be positive")
    if not 0.0 < fov <= TWO_PI:
        raise ValueError("fov must be in (0, 2*pi]")
    hits = []
    for item in state.trash:
        if item.collected:
            continue
        dist = math.hypot(item.x - state.x, item.y - state.y)
        if dist > sensor_range:
            continue
        if dist == 0.0:
            bearing = 0.0
        else:
            bearing = wrap_angle(math.atan2(item.y - state.y, item.x - state.x) - state.heading)
        if abs(bearing) <= fov / 2.0:
            hits.append((dist, item.id, bearing))
    hits.sort()
    return [(bearing, dist, item_id) for dist, item_id, bearing in hits]


class PiecewiseLinearProfile:
    """Piecewise-linear (t, value) profile; flat extrapolation at both ends."""

    def __init__(self, points: list[tuple[float, float]]):
        if not points:
            raise ValueError("profile needs at least one point")
        ts = [t for t, _ in points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("profile times must be strictly increasing")
        self.points = [(float(t), float(v)) for t, v in points]

    def __call__(self, t: float) -> float:
        pts = self.points
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        raise AssertionError("unreachable")


def constant_profile(value: float) -> PiecewiseLinearProfile:
    return PiecewiseLinearProfile([(0.0, value)])
