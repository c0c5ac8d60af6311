"""skimwatch command line: gcs, sim, fence, gen, version.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 link failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__, protocol
from .bot import BotAgent
from .fence.frames import Frame, PgmError, iter_frame_dir, read_pgm
from .fence.geometry import DirectionMode, FencePolyline, Side
from .fence.pipeline import FenceParams, FenceState, process_frame
from .gcs.core import GcsCore
from .gcs.eventlog import EventLog
from .gcs.server import GcsService
from .gen import gen_fence_sequence, gen_trash_field, gen_trash_near_path
from .scenario import ScenarioConfig, ScenarioError, bundled_scenario, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_LINK = 3

log = logging.getLogger("skimwatch")


# -- link transports for the sim -------------------------------------------

class LoopbackLink:
    """In-process GCS: the sim's bytes go straight through the codec."""

    def __init__(self):
        self.core = GcsCore(EventLog(None))
        self._decoder = protocol.StreamDecoder()
        self._to_bot = bytearray()
        self.core.attach_bot_sender(self._to_bot.extend)

    def exchange(self, outbound: bytes) -> bytes:
        for decoded in self._decoder.feed(outbound):
            self.core.ingest(decoded)
        inbound = bytes(self._to_bot)
        self._to_bot.clear()
        return inbound

    def alerts_emitted(self) -> int:
        return sum(1 for r in self.core.log.records() if r.kind == "ALERT")

    def close(self) -> None:
        pass


class TcpLink:
    def __init__(self, host: str, port: int):
        self._sock = socket.create_connection((host, port), timeout=5.0)
        self._sock.setblocking(False)

    def exchange(self, outbound: bytes) -> bytes:
        if outbound:
            self._sock.sendall(outbound)
        try:
            return self._sock.recv(65536)
        except (BlockingIOError, InterruptedError):
            return b""

    def alerts_emitted(self) -> int:
        return 0  # the remote GCS owns the alert log

    def close(self) -> None:
        self._sock.close()


def _parse_host_port(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


# -- subcommands -------------------------------------------------------------

def cmd_gcs(args) -> int:
    defaults = {"http_port": 8081, "proto_port": 9000, "log": None,
                "token": None, "ui_dir": None}
    if args.config:
        try:
            defaults.update(json.loads(Path(args.config).read_text()))
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except json.JSONDecodeError as exc:
            print(f"invalid config: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
    env = os.environ
    http_port = args.http_port if args.http_port is not None else \
        int(env.get("WATERCARE_HTTP_PORT", defaults["http_port"]))
    proto_port = args.proto_port if args.proto_port is not None else \
        int(env.get("WATERCARE_PROTO_PORT", defaults["proto_port"]))
    log_path = args.log or env.get("WATERCARE_LOG") or defaults["log"]
    token = args.token or env.get("WATERCARE_TOKEN") or defaults["token"]
    ui_dir = args.ui_dir or defaults["ui_dir"]

    try:
        service = GcsService(http_port=http_port, proto_port=proto_port,
                             log_path=log_path, token=token, ui_dir=ui_dir)
    except OSError as exc:
        # Covers ports in use and unwritable log paths alike.
        print(f"cannot start GCS (http={http_port} proto={proto_port}): {exc}",
              file=sys.stderr)
        return EXIT_IO
    service.start()
    print(f"GCS listening: http={service.http_port} proto={service.proto_port}",
          flush=True)
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        service.stop()
    return EXIT_OK


def _resolve_scenario(name: str, seed: int | None) -> ScenarioConfig:
    path = Path(name)
    if path.exists():
        cfg = load_scenario(path)
    else:
        try:
            cfg = bundled_scenario(name)
        except FileNotFoundError:
            raise FileNotFoundError(f"scenario {name!r}: no such file or bundled name")
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg


def run_simulation(cfg: ScenarioConfig, link, realtime: bool = False,
                   duration: float | None = None) -> dict:
    """Step the bot agent against a link; returns the run report."""
    agent = BotAgent(cfg)
    dt = cfg.run.dt
    duration = cfg.run.duration_s if duration is None else duration
    steps = round(duration / dt)
    started = time.monotonic()
    for k in range(steps):
        inbound = link.exchange(agent.tick(dt))
        if inbound:
            link.exchange(agent.handle_bytes(inbound))
        if realtime:
            target = started + (k + 1) * dt
            lag = target - time.monotonic()
            if lag > 0:
                time.sleep(lag)
    wall = time.monotonic() - started
    return {
        "scenario": cfg.name,
        "seed": cfg.seed,
        "waypoints_reached": agent.metrics.waypoints_reached,
        "items_collected": agent.metrics.items_collected,
        "payload_kg": round(agent.state.payload_kg, 6),
        "distance_traveled_m": round(agent.metrics.distance_traveled, 3),
        "energy_consumed_wh": round(agent.metrics.energy_consumed_wh, 6),
        "energy_harvested_wh": round(agent.metrics.energy_harvested_wh, 6),
        "alerts_emitted": link.alerts_emitted(),
        "wall_time_s": round(wall, 3),
    }


def cmd_sim(args) -> int:
    try:
        cfg = _resolve_scenario(args.scenario, args.seed)
    except FileNotFoundError as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    except ScenarioError as exc:
        print(f"scenario invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.gcs:
        try:
            link = TcpLink(*_parse_host_port(args.gcs))
        except OSError as exc:
            print(f"cannot reach GCS at {args.gcs}: {exc}", file=sys.stderr)
            return EXIT_LINK
    else:
        link = LoopbackLink()

    try:
        report = run_simulation(cfg, link, realtime=args.realtime,
                                duration=args.duration)
    finally:
        link.close()

    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.report:
        try:
            Path(args.report).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fence(args) -> int:
    directory = Path(args.frames)
    if not directory.is_dir():
        print(f"frame directory {directory} not found", file=sys.stderr)
        return EXIT_IO
    try:
        fence = FencePolyline.parse(
            args.fence,
            protected_side=Side.LEFT if args.protected == "left" else Side.RIGHT,
            direction_mode=(DirectionMode.ANY if args.mode == "any"
                            else DirectionMode.INTO_PROTECTED))
        params = FenceParams(diff_threshold=args.diff_threshold,
                             min_area=args.min_area,
                             max_match_dist=args.max_match_dist,
                             max_missed=args.max_missed,
                             cooldown=args.cooldown)
    except ValueError as exc:
        print(f"invalid fence configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    sender = None
    if args.gcs:
        try:
            host, port = _parse_host_port(args.gcs)
            sender = socket.create_connection((host, port), timeout=5.0)
        except OSError as exc:
            print(f"cannot reach GCS at {args.gcs}: {exc}", file=sys.stderr)
            return EXIT_LINK

    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    seq = 0
    alerts_written = 0
    try:
        state = None
        for frame in iter_frame_dir(directory, interval_ms=args.interval_ms):
            if state is None:
                background = frame
                if args.background:
                    width, height, pixels = read_pgm(args.background)
                    background = Frame(width=width, height=height, pixels=pixels)
                state = FenceState(background=background, fence=fence,
                                   params=params, camera_id=args.camera_id)
            state, alerts = process_frame(state, frame)
            for alert in alerts:
                out.write(json.dumps({"t_ms": alert.t_ms,
                                      "camera_id": alert.camera_id,
                                      "count": alert.count},
                                     sort_keys=True) + "\n")
                alerts_written += 1
                if sender is not None:
                    wire = protocol.encode(
                        protocol.FenceAlert(t_ms=alert.t_ms,
                                            camera_id=alert.camera_id,
                                            count=alert.count),
                        seq, protocol.SYS_ID_FENCE, 0)
                    seq = (seq + 1) & 0xFF
                    sender.sendall(wire)
    except PgmError as exc:
        print(f"malformed frame: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        if out is not sys.stdout:
            out.close()
        if sender is not None:
            sender.close()
    log.info("fence run complete: %d alerts", alerts_written)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "fence-sequence":
        if not args.out:
            print("gen fence-sequence requires --out DIR", file=sys.stderr)
            return EXIT_VALIDATION
        kwargs = {}
        if args.preset == "single-crossing":
            pass  # generator defaults are the single-crossing sequence
        elif args.crossings is not None:
            kwargs["crossings"] = args.crossings
            kwargs["direction_mode"] = DirectionMode.ANY
        if args.frames is not None:
            kwargs["frames"] = args.frames
        try:
            manifest = gen_fence_sequence(args.out, **kwargs)
        except (ValueError, OSError) as exc:
            print(f"generation failed: {exc}", file=sys.stderr)
            return EXIT_VALIDATION if isinstance(exc, ValueError) else EXIT_IO
        print(json.dumps({"out": str(args.out),
                          "frames": manifest["frames"],
                          "expected_crossings": manifest["expected_crossings"]}))
        return EXIT_OK

    if args.kind == "trash":
        if args.near_path:
            path = [(float(x), float(y)) for x, y in
                    (pair.split(",") for pair in args.near_path.split(";") if pair)]
            items = gen_trash_near_path(args.n, path, seed=args.seed or 0,
                                        max_offset=args.max_offset)
        else:
            items = gen_trash_field(args.n, seed=args.seed or 0)
        text = json.dumps({"trash": items}, indent=2) + "\n"
        if args.out:
            try:
                Path(args.out).write_text(text, encoding="utf-8")
            except OSError as exc:
                print(f"cannot write {args.out}: {exc}", file=sys.stderr)
                return EXIT_IO
        else:
            sys.stdout.write(text)
        return EXIT_OK

    print(f"unknown gen kind {args.kind!r}", file=sys.stderr)
    return EXIT_VALIDATION


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skimwatch")
    parser.add_argument("--log-level", default="warning",
                        choices=["debug", "info", "warning", "error"])
    parser.add_argument("--config", help="JSON config with gcs defaults")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gcs", help="run the ground-control service")
    p.add_argument("--http-port", type=int, default=None)
    p.add_argument("--proto-port", type=int, default=None)
    p.add_argument("--log", help="append-only event log path")
    p.add_argument("--token", help="bearer token for the operator API")
    p.add_argument("--ui-dir", help="static operator UI bundle to serve")
    p.set_defaults(func=cmd_gcs)

    p = sub.add_parser("sim", help="run the bot simulator")
    p.add_argument("scenario", help="scenario file or bundled name")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--gcs", help="GCS protocol address host:port")
    group.add_argument("--loopback", action="store_true",
                       help="in-process GCS (default)")
    p.add_argument("--headless", action="store_true",
                   help="no pacing (default behavior)")
    p.add_argument("--realtime", action="store_true",
                   help="throttle stepping to the wall clock")
    p.add_argument("--duration", type=float, default=None,
                   help="override run duration in seconds")
    p.add_argument("--report", help="write the run report JSON here")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("fence", help="run the virtual-fence pipeline")
    p.add_argument("--frames", required=True, help="directory of P5 PGM frames")
    p.add_argument("--fence", required=True, help='polyline "x1,y1;x2,y2;..."')
    p.add_argument("--protected", choices=["left", "right"], default="left")
    p.add_argument("--mode", choices=["into_protected", "any"],
                   default="into_protected")
    p.add_argument("--background", help="background PGM (default: first frame)")
    p.add_argument("--out", help="alert log path (default: stdout)")
    p.add_argument("--gcs", help="also send FENCE_ALERT frames to host:port")
    p.add_argument("--interval-ms", type=int, default=100)
    p.add_argument("--camera-id", type=int, default=1)
    p.add_argument("--diff-threshold", type=int, default=25)
    p.add_argument("--min-area", type=int, default=6)
    p.add_argument("--max-match-dist", type=float, default=20.0)
    p.add_argument("--max-missed", type=int, default=5)
    p.add_argument("--cooldown", type=int, default=10)
    p.set_defaults(func=cmd_fence)

    p = sub.add_parser("gen", help="generate synthetic assets")
    p.add_argument("kind", choices=["fence-sequence", "trash"])
    p.add_argument("--out", help="output directory or file")
    p.add_argument("--preset", choices=["single-crossing"], default=None)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--crossings", type=int, default=None)
    p.add_argument("--n", type=int, default=10, help="trash item count")
    p.add_argument("--near-path", help='scatter along "x,y;x,y;..." polyline')
    p.add_argument("--max-offset", type=float, default=1.8)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("version", help="print the version")
    p.set_defaults(func=lambda args: (print(__version__), EXIT_OK)[1])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
