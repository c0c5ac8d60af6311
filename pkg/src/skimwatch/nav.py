"""Onboard guidance and control.

Pure functions over value types: crow's-flight bearing guidance to the active
waypoint, a PD heading controller mixed into differential thrust, and the
mission mode machine. The sim loop (bot.py) drives these once per step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .world import BotParams, ThrustCommand, wrap_angle

DEFAULT_ACCEPT_RADIUS = 3.0


class MissionMode(enum.IntEnum):
    DISARMED = 0
    ARMED = 1
    MISSION = 2
    HOLD = 3
    RTL = 4
    COMPLETE = 5


class Command(enum.IntEnum):
    ARM = 1
    DISARM = 2
    START = 3
    HOLD = 4
    RTL = 5
    CONVEYOR_ON = 6
    CONVEYOR_OFF = 7


# Modes in which mission_step must emit exactly zero thrust.
PASSIVE_MODES = frozenset(
    {MissionMode.DISARMED, MissionMode.ARMED, MissionMode.HOLD, MissionMode.COMPLETE}
)


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    accept_radius: float = DEFAULT_ACCEPT_RADIUS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("waypoint coordinates must be finite")
        if not (math.isfinite(self.accept_radius) and self.accept_radius > 0):
            raise ValueError("accept_radius must be positive")


@dataclass(frozen=True)
class Mission:
    waypoints: tuple[Waypoint, ...] = ()
    active_index: int = 0
    home: tuple[float, float] = (0.0, 0.0)
    mode: MissionMode = MissionMode.DISARMED

    def __post_init__(self) -> None:
        if not 0 <= self.active_index <= len(self.waypoints):
            raise ValueError(f"active_index {self.active_index} outside [0, {len(self.waypoints)}]")
        if self.mode is MissionMode.MISSION and not self.waypoints:
            raise ValueError("MISSION mode requires a non-empty waypoint list")

    @property
    def armed(self) -> bool:
        return self.mode is not MissionMode.DISARMED


@dataclass(frozen=True)
class NavGains:
    kp_heading: float         # N of thrust differential per rad of error
    kd_heading: float         # N per rad/s of yaw rate
    cruise_thrust: float      # N per side
    slowdown_radius: float = 10.0  # m

    def __post_init__(self) -> None:
        if self.kp_heading <= 0:
            raise ValueError("kp_heading must be positive")
        if self.kd_heading < 0:
            raise ValueError("kd_heading must be non-negative")
        if self.cruise_thrust <= 0:
            raise ValueError("cruise_thrust must be positive")
        if self.slowdown_radius <= 0:
            raise ValueError("slowdown_radius must be positive")


def default_gains(params: BotParams) -> NavGains:
    """Gains scaled off max thrust; tuned to meet the convergence properties."""
    m = params.max_thrust_per_side
    return NavGains(kp_heading=0.8 * m, kd_heading=0.3 * m, cruise_thrust=0.6 * m)


def guidance(pose: tuple[float, float, float], wp: Waypoint) -> tuple[float, float]:
    """Crow's-flight bearing and distance from pose to waypoint.

    On top of the waypoint (distance 0) the direction is undefined; the
    current heading is returned so the controller holds course.
    """
    x, y, heading = pose
    for v in (x, y, heading, wp.x, wp.y):
        if not math.isfinite(v):
            raise ValueError("guidance requires finite inputs")
    dx, dy = wp.x - x, wp.y - y
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        return heading, 0.0
    return math.atan2(dy, dx), distance


def wrap_error(desired: float, actual: float) -> float:
    """Minimal signed angular difference desired - actual, in (-pi, pi]."""
    if not (math.isfinite(desired) and math.isfinite(actual)):
        raise ValueError("wrap_error requires finite inputs")
    return wrap_angle(desired - actual)


def heading_controller(error: float, yaw_rate: float, gains: NavGains,
                       distance: float, max_thrust: float) -> ThrustCommand:
    """PD heading correction mixed into differential thrust.

    Positive error (target to port) raises the starboard side. Base thrust
    tapers linearly inside slowdown_radius.
    """
    delta = gains.kp_heading * error - gains.kd_heading * yaw_rate
    base = gains.cruise_thrust * min(1.0, distance / gains.slowdown_radius)
    left = min(max(base - delta, -max_thrust), max_thrust)
    right = min(max(base + delta, -max_thrust), max_thrust)
    return ThrustCommand(left=left, right=right)


ZERO_THRUST = ThrustCommand(0.0, 0.0)


def mission_step(mission: Mission, pose: tuple[float, float, float], yaw_rate: float,
                 gains: NavGains, params: BotParams) -> tuple[Mission, ThrustCommand]:
    """One guidance step: advance waypoints on arrival, emit thrust.

    Arrival is edge-triggered on distance <= accept_radius at a step boundary;
    at most one waypoint is consumed per step. Passive modes (and RTL once
    home) emit zero thrust.
    """
    if mission.mode is MissionMode.MISSION:
        wp = mission.waypoints[mission.active_index]
        _, distance = guidance(pose, wp)
        if distance <= wp.accept_radius:
            nxt = mission.active_index + 1
            if nxt >= len(mission.waypoints):
                return replace(mission, active_index=nxt, mode=MissionMode.COMPLETE), ZERO_THRUST
            mission = replace(mission, active_index=nxt)
            wp = mission.waypoints[mission.active_index]
        desired, distance = guidance(pose, wp)
        error = wrap_error(desired, pose[2])
        return mission, heading_controller(error, yaw_rate, gains, distance,
                                           params.max_thrust_per_side)

    if mission.mode is MissionMode.RTL:
        home = Waypoint(mission.home[0], mission.home[1], DEFAULT_ACCEPT_RADIUS)
        desired, distance = guidance(pose, home)
        if distance <= home.accept_radius:
            return replace(mission, mode=MissionMode.COMPLETE), ZERO_THRUST
        error = wrap_error(desired, pose[2])
        return mission, heading_controller(error, yaw_rate, gains, distance,
                                           params.max_thrust_per_side)

    return mission, ZERO_THRUST


def apply_command(mission: Mission, cmd: Command) -> tuple[Mission, bool | None, bool]:
    """Run one operator command through the mode transition table.

    Returns (mission, conveyor_request, accepted). Rejections leave the
    mission untouched and request nothing.
    """
    mode = mission.mode
    if cmd is Command.ARM:
        if mode is MissionMode.DISARMED:
            return replace(mission, mode=MissionMode.ARMED), None, True
        return mission, None, False
    if cmd is Command.DISARM:
        return replace(mission, mode=MissionMode.DISARMED), None, True
    if cmd is Command.START:
        if mode in (MissionMode.ARMED, MissionMode.HOLD) and mission.waypoints:
            index = min(mission.active_index, len(mission.waypoints) - 1)
            return replace(mission, mode=MissionMode.MISSION, active_index=index), None, True
        return mission, None, False
    if cmd is Command.HOLD:
        if mode in (MissionMode.MISSION, MissionMode.RTL):
            return replace(mission, mode=MissionMode.HOLD), None, True
        return mission, None, False
    if cmd is Command.RTL:
        if mode in (MissionMode.MISSION, MissionMode.HOLD):
            return replace(mission, mode=MissionMode.RTL), None, True
        return mission, None, False
    if cmd in (Command.CONVEYOR_ON, Command.CONVEYOR_OFF):
        if mode is MissionMode.DISARMED:
            return mission, None, False
        return mission, cmd is Command.CONVEYOR_ON, True
    return mission, None, False


def load_waypoints(mission: Mission, waypoints: tuple[Waypoint, ...]) -> tuple[Mission, bool]:
    """Replace the waypoint list (mission upload).

    Rejected while a mission is actively running. Resets active_index; a
    COMPLETE mission drops back to ARMED so a new START is legal.
    """
    if mission.mode is MissionMode.MISSION:
        return mission, False
    mode = MissionMode.ARMED if mission.mode is MissionMode.COMPLETE else mission.mode
    return replace(mission, waypoints=tuple(waypoints), active_index=0, mode=mode), True
