"""The simulated bot process: world stepping, guidance, and the telemetry link.

BotAgent is transport-agnostic: inbound wire bytes go through handle_bytes(),
each tick() returns the frames to send. The CLI drives it against a TCP GCS
or an in-process loopback; tests drive it directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import nav, protocol, world
from .scenario import ScenarioConfig

COMMAND_BYTES = {c.value: c for c in nav.Command}
UPLOAD_TIMEOUT_S = 2.0


@dataclass
class RunMetrics:
    waypoints_reached: int = 0
    items_collected: int = 0
    distance_traveled: float = 0.0
    energy_consumed_wh: float = 0.0
    energy_harvested_wh: float = 0.0


class BotAgent:
    """One simulated bot: owns WorldState + Mission, speaks the wire protocol."""

    def __init__(self, cfg: ScenarioConfig, sys_id: int = protocol.SYS_ID_BOT,
                 comp_id: int = 1):
        self.cfg = cfg
        self.params = cfg.params
        self.gains = cfg.nav_gains()
        self.solar = cfg.solar()
        self.state = cfg.initial_world()
        self.mission = nav.Mission(home=(cfg.pose[0], cfg.pose[1]))
        self.metrics = RunMetrics()
        self.arrival_log: list[tuple[int, float]] = []  # (waypoint index, sim t)
        self.sys_id = sys_id
        self.comp_id = comp_id
        self._seq = 0
        self._decoder = protocol.StreamDecoder()
        self._conveyor_requested = cfg.mission.conveyor == "on"
        self._upload: dict | None = None  # {"count", "items", "deadline"}
        self._next_heartbeat = 0.0
        self._next_telemetry = 0.0
        if cfg.mission.auto_start and cfg.mission.waypoints:
            self.mission = nav.Mission(waypoints=cfg.mission.waypoints,
                                       home=(cfg.pose[0], cfg.pose[1]),
                                       mode=nav.MissionMode.MISSION)

    # -- wire side ----------------------------------------------------------

    def _frame(self, msg) -> bytes:
        data = protocol.encode(msg, self._seq, self.sys_id, self.comp_id)
        self._seq = (self._seq + 1) & 0xFF
        return data

    def handle_bytes(self, data: bytes) -> bytes:
        """Process inbound frames; returns ack/reply frames to send back."""
        out = bytearray()
        for decoded in self._decoder.feed(data):
            out += self._handle_message(decoded.msg)
        return bytes(out)

    def _handle_message(self, msg) -> bytes:
        if isinstance(msg, protocol.CommandMsg):
            return self._handle_command(msg.cmd)
        if isinstance(msg, protocol.MissionCount):
            return self._handle_mission_count(msg.count)
        if isinstance(msg, protocol.MissionItem):
            return self._handle_mission_item(msg)
        return b""

    def _handle_command(self, cmd_byte: int) -> bytes:
        cmd = COMMAND_BYTES.get(cmd_byte)
        if cmd is None:
            return self._frame(protocol.CommandAck(cmd=cmd_byte,
                                                   result=protocol.ACK_REJECTED))
        mission, conveyor, accepted = nav.apply_command(self.mission, cmd)
        if accepted and cmd is nav.Command.ARM:
            mission = replace(mission, home=(self.state.x, self.state.y))
        self.mission = mission
        if conveyor is not None:
            self._conveyor_requested = conveyor
        result = protocol.ACK_OK if accepted else protocol.ACK_REJECTED
        return self._frame(protocol.CommandAck(cmd=cmd_byte, result=result))

    def _handle_mission_count(self, count: int) -> bytes:
        if self.mission.mode is nav.MissionMode.MISSION or count == 0:
            return self._frame(protocol.MissionAck(result=protocol.MISSION_ACK_REJECTED))
        self._upload = {"count": count, "items": {},
                        "deadline": self.state.t + UPLOAD_TIMEOUT_S}
        return b""

    def _handle_mission_item(self, item: protocol.MissionItem) -> bytes:
        if self._upload is None:
            return b""
        if item.index < self._upload["count"]:
            self._upload["items"][item.index] = nav.Waypoint(
                x=item.x, y=item.y, accept_radius=item.accept_radius)
        if len(self._upload["items"]) == self._upload["count"]:
            waypoints = tuple(self._upload["items"][i]
                              for i in range(self._upload["count"]))
            self._upload = None
            self.mission, ok = nav.load_waypoints(self.mission, waypoints)
            result = protocol.MISSION_ACK_OK if ok else protocol.MISSION_ACK_REJECTED
            return self._frame(protocol.MissionAck(result=result))
        return b""

    def _check_upload_timeout(self) -> bytes:
        if self._upload is not None and self.state.t > self._upload["deadline"]:
            self._upload = None
            return self._frame(protocol.MissionAck(result=protocol.MISSION_ACK_TIMEOUT))
        return b""

    # -- sim side -----------------------------------------------------------

    def _steer(self) -> world.ThrustCommand:
        """Mission guidance, with a detour to the nearest sensed trash item."""
        pose = (self.state.x, self.state.y, self.state.heading)
        before = self.mission.active_index
        self.mission, cmd = nav.mission_step(self.mission, pose, self.state.yaw_rate,
                                             self.gains, self.params)
        if self.mission.active_index > before:
            self.metrics.waypoints_reached += 1
            self.arrival_log.append((before, self.state.t))

        if (self.mission.mode is nav.MissionMode.MISSION
                and self.cfg.mission.collect_detours):
            hits = world.trash_sensor(self.state, self.cfg.mission.sensor_range,
                                      self.cfg.mission.sensor_fov)
            if hits:
                bearing, distance, _ = hits[0]
                error = nav.wrap_error(self.state.heading + bearing, self.state.heading)
                cmd = nav.heading_controller(error, self.state.yaw_rate, self.gains,
                                             max(distance, self.params.intake_reach),
                                             self.params.max_thrust_per_side)
        return cmd

    def _conveyor_on(self) -> bool:
        policy = self.cfg.mission.conveyor
        if policy == "off":
            return False
        if not self.mission.armed:
            return False
        if policy == "on" or self._conveyor_requested:
            return True
        # auto: run the belt while the sensor sees anything
        return bool(world.trash_sensor(self.state, self.cfg.mission.sensor_range,
                                       self.cfg.mission.sensor_fov))

    def tick(self, dt: float) -> bytes:
        """Advance one step; returns telemetry/ack frames to transmit."""
        out = bytearray(self._check_upload_timeout())

        cmd = self._steer()
        conveyor = self._conveyor_on()
        if self.state.power.dead:
            cmd = world.ThrustCommand(0.0, 0.0)
            conveyor = False
        self.state = replace(self.state, conveyor_on=conveyor)

        loads = world.electrical_loads(self.params, cmd, conveyor)
        solar_w = self.solar(self.state.t)
        prev_x, prev_y = self.state.x, self.state.y

        self.state = world.step(self.state, cmd, self.params, dt)
        power = world.update_power(self.state.power, solar_w, loads, dt)
        self.state = replace(self.state, power=power)
        self.state, taken = world.collect_trash(self.state, self.params)

        self.metrics.items_collected += len(taken)
        self.metrics.distance_traveled += math.hypot(self.state.x - prev_x,
                                                     self.state.y - prev_y)
        self.metrics.energy_consumed_wh += power.total_load * dt / 3600.0
        self.metrics.energy_harvested_wh += power.solar_input * dt / 3600.0

        out += self._telemetry()
        return bytes(out)

    def _telemetry(self) -> bytes:
        out = bytearray()
        t = self.state.t
        t_ms = int(round(t * 1000.0))
        if t >= self._next_heartbeat:
            self._next_heartbeat = t + 1.0 / self.cfg.run.heartbeat_hz
            out += self._frame(protocol.Heartbeat(mode=int(self.mission.mode),
                                                  armed=int(self.mission.armed)))
        if t >= self._next_telemetry:
            self._next_telemetry = t + 1.0 / self.cfg.run.telemetry_hz
            out += self._frame(protocol.Position(t_ms=t_ms, x=self.state.x,
                                                 y=self.state.y,
                                                 heading=self.state.heading,
                                                 speed=self.state.surge_speed))
            out += self._frame(protocol.Power(soc_wh=self.state.power.soc,
                                              solar_w=self.state.power.solar_input,
                                              load_w=self.state.power.total_load))
            collected = sum(1 for item in self.state.trash if item.collected)
            out += self._frame(protocol.TrashStatus(payload_kg=self.state.payload_kg,
                                                    items=collected))
        return bytes(out)
