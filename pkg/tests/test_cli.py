"""CLI subcommands: exit codes, determinism, offline/online equivalence."""

import json
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest

from skimwatch import cli
from skimwatch.gcs.eventlog import EventLog
from skimwatch.gcs.server import GcsService


def run_cli(*argv):
    return cli.main(list(argv))


def test_version(capsys):
    assert run_cli("version") == 0
    assert capsys.readouterr().out.strip()


class TestSim:
    def test_duration_zero_empty_report(self, tmp_path):
        report_path = tmp_path / "report.json"
        code = run_cli("sim", "square", "--duration", "0",
                       "--report", str(report_path))
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["waypoints_reached"] == 0
        assert report["distance_traveled_m"] == 0.0

    def test_unknown_scenario_is_io_error(self, capsys):
        assert run_cli("sim", "no-such-scenario") == 2

    def test_invalid_scenario_is_validation_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"bot": {"mass": -4}}))
        assert run_cli("sim", str(bad)) == 1

    def test_unreachable_gcs_is_link_error(self):
        # A port nothing listens on.
        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        assert run_cli("sim", "square", "--gcs", f"127.0.0.1:{port}",
                       "--duration", "1") == 3

    def test_same_seed_reports_identical(self, tmp_path):
        reports = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            assert run_cli("sim", "square", "--report", str(path),
                           "--duration", "120") == 0
            data = json.loads(path.read_text())
            data.pop("wall_time_s")
            reports.append(json.dumps(data, sort_keys=True))
        assert reports[0] == reports[1]


class TestFence:
    def test_empty_directory_zero_alerts(self, tmp_path, capsys):
        frames = tmp_path / "frames"
        frames.mkdir()
        assert run_cli("fence", "--frames", str(frames), "--fence", "0,32;63,32") == 0
        assert capsys.readouterr().out == ""

    def test_missing_directory_io_error(self, tmp_path):
        assert run_cli("fence", "--frames", str(tmp_path / "nope"),
                       "--fence", "0,0;1,1") == 2

    def test_malformed_pgm_names_file(self, tmp_path, capsys):
        frames = tmp_path / "frames"
        frames.mkdir()
        (frames / "000.pgm").write_bytes(b"P5\n4 4\n255\nXX")
        assert run_cli("fence", "--frames", str(frames), "--fence", "0,0;1,1") == 2
        assert "000.pgm" in capsys.readouterr().err

    def test_generated_single_crossing_yields_one_alert(self, tmp_path, capsys):
        seq_dir = tmp_path / "seq"
        assert run_cli("gen", "fence-sequence", "--out", str(seq_dir)) == 0
        capsys.readouterr()
        out_path = tmp_path / "alerts.jsonl"
        assert run_cli("fence", "--frames", str(seq_dir), "--fence", "0,32;63,32",
                       "--protected", "left", "--out", str(out_path)) == 0
        lines = out_path.read_text().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["count"] == 1

    def test_offline_and_online_logs_identical(self, tmp_path, capsys):
        seq_dir = tmp_path / "seq"
        run_cli("gen", "fence-sequence", "--out", str(seq_dir))
        capsys.readouterr()
        offline = tmp_path / "offline.jsonl"
        online = tmp_path / "online.jsonl"
        assert run_cli("fence", "--frames", str(seq_dir), "--fence", "0,32;63,32",
                       "--out", str(offline)) == 0

        service = GcsService(http_port=0, proto_port=0)
        service.start()
        try:
            assert run_cli("fence", "--frames", str(seq_dir),
                           "--fence", "0,32;63,32", "--out", str(online),
                           "--gcs", f"127.0.0.1:{service.proto_port}") == 0
            deadline = time.monotonic() + 5.0
            while time.monotonic() < deadline:
                alerts = [r for r in service.core.log.records() if r.kind == "ALERT"]
                if alerts:
                    break
                time.sleep(0.02)
            assert len(alerts) == 1
            assert alerts[0].body["count"] == 1
        finally:
            service.stop()
        assert offline.read_bytes() == online.read_bytes()


class TestGen:
    def test_trash_zero_items(self, capsys):
        assert run_cli("gen", "trash", "--n", "0") == 0
        assert json.loads(capsys.readouterr().out) == {"trash": []}

    def test_trash_seeded_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("--seed", "5", "gen", "trash", "--n", "12",
                       "--out", str(a)) == 0
        assert run_cli("--seed", "5", "gen", "trash", "--n", "12",
                       "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()
        items = json.loads(a.read_text())["trash"]
        assert len(items) == 12

    def test_fence_sequence_deterministic(self, tmp_path, capsys):
        dirs = [tmp_path / "s1", tmp_path / "s2"]
        for d in dirs:
            assert run_cli("gen", "fence-sequence", "--out", str(d)) == 0
        files_a = sorted(p.name for p in dirs[0].iterdir())
        files_b = sorted(p.name for p in dirs[1].iterdir())
        assert files_a == files_b
        for name in files_a:
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_multi_crossing_manifest_matches_pipeline(self, tmp_path, capsys):
        seq_dir = tmp_path / "zigzag"
        assert run_cli("gen", "fence-sequence", "--out", str(seq_dir),
                       "--crossings", "3") == 0
        manifest = json.loads((seq_dir / "manifest.json").read_text())
        assert manifest["expected_crossings"] == 3
        capsys.readouterr()
        out_path = tmp_path / "alerts.jsonl"
        assert run_cli("fence", "--frames", str(seq_dir),
                       "--fence", manifest["fence"], "--mode", "any",
                       "--out", str(out_path)) == 0
        assert len(out_path.read_text().splitlines()) == 3


class TestGcsCommand:
    def test_port_in_use_fails_fast(self, capsys):
        squatter = socket.socket()
        squatter.bind(("127.0.0.1", 0))
        squatter.listen(1)
        port = squatter.getsockname()[1]
        try:
            assert run_cli("gcs", "--http-port", str(port),
                           "--proto-port", "0") == 2
            assert "in use" in capsys.readouterr().err
        finally:
            squatter.close()

    def test_bad_log_path_no_partial_log(self, tmp_path, capsys):
        bad = tmp_path / "missing-dir" / "events.jsonl"
        assert run_cli("gcs", "--http-port", "0", "--proto-port", "0",
                       "--log", str(bad)) == 2
        assert not bad.exists()

    def test_sigint_clean_shutdown_log_replays(self, tmp_path):
        log_path = tmp_path / "events.jsonl"
        proc = subprocess.Popen(
            [sys.executable, "-m", "skimwatch.cli", "gcs", "--http-port", "0",
             "--proto-port", "0", "--log", str(log_path)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
        try:
            line = proc.stdout.readline()
            assert "GCS listening" in line
            time.sleep(0.2)
            proc.send_signal(signal.SIGINT)
            assert proc.wait(timeout=10) == 0
        finally:
            if proc.poll() is None:
                proc.kill()
        log = EventLog(log_path)
        types = [r.body.get("type") for r in log.records()]
        assert types[0] == "SERVICE_START"
        assert types[-1] == "SERVICE_STOP"
        log.close()
