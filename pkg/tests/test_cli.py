import json
import os
import signal
import subprocess
import sys
import time

import pytest
from click.testing import CliRunner

from quac.cli import main

from . import golden
from .corpus import build_corpus


class TestPersonasCommand:
    def test_json_catalog(self):
        result = CliRunner().invoke(main, ["personas"])
        assert result.exit_code == 0
        personas = json.loads(result.output)
        assert len(personas) == 8
        assert [p["id"] for p in personas] == [
            "mentor", "cheerleader", "critic", "designer", "analyst", "ceo", "friend", "no_persona",
        ]
        critic = personas[2]
        assert critic["voice"] == {"id": "O7p2vmz2iEYgMXxkbsif", "description": "Non-binary, English, Sassy"}
        assert set(critic) == {"id", "display_name", "axis", "voice", "icon_ref"}


class TestAnalyzeCommand:
    def test_stats_output(self, tmp_path):
        paths = build_corpus(tmp_path)
        result = CliRunner().invoke(main, ["analyze", *map(str, paths)])
        assert result.exit_code == 0
        assert "13.25" in result.output
        assert "critic" in result.output

    def test_json_output(self, tmp_path):
        paths = build_corpus(tmp_path)
        result = CliRunner().invoke(main, ["analyze", "--json", *map(str, paths)])
        assert result.exit_code == 0
        stats = json.loads(result.output)
        assert stats["total_requests"] == 106
        assert stats["manual_total"] == 45
        assert stats["mean_total_per_session"] == 13.25
        assert stats["persona_totals"]["critic"] == 31

    def test_svg_output(self, tmp_path):
        paths = build_corpus(tmp_path)
        out = tmp_path / "timeline.svg"
        result = CliRunner().invoke(main, ["analyze", "--svg", str(out), *map(str, paths)])
        assert result.exit_code == 0
        assert out.read_text().startswith("<svg")

    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"type":"session_mark","mark":"start","timestamp":0}\nnope\n{"a":1}\n')
        result = CliRunner().invoke(main, ["analyze", str(bad)])
        assert result.exit_code == 4


def test_trigger_without_daemon_exits_3(tmp_path):
    result = CliRunner().invoke(main, ["trigger", "--socket", str(tmp_path / "none.sock")])
    assert result.exit_code == 3


@pytest.fixture
def daemon(tmp_path):
    socket_path = tmp_path / "quac.sock"
    config = tmp_path / "config"
    config.write_text("persona = critic\ncycle.voice = off\ncycle.emoji = off\n")
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "quac.cli", "run",
            "--socket", str(socket_path),
            "--config", str(config),
            "--provider", "mock",
            "--capture", "fake",
            "--session-dir", str(tmp_path / "sessions"),
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    deadline = time.monotonic() + 10
    while not socket_path.exists():
        if time.monotonic() > deadline or proc.poll() is not None:
            raise RuntimeError(f"daemon failed to start: {proc.stderr.read().decode()}")
        time.sleep(0.05)
    yield socket_path, tmp_path / "sessions"
    proc.send_signal(signal.SIGTERM)
    try:
        proc.wait(timeout=5)
    except subprocess.TimeoutExpired:
        proc.kill()


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "quac.cli", *args], capture_output=True, text=True, timeout=30
    )


class TestEndToEnd:
    def test_trigger_prints_feedback(self, daemon):
        socket_path, _ = daemon
        result = run_cli("trigger", "--persona", "critic", "--socket", str(socket_path))
        assert result.returncode == 0, result.stderr
        assert result.stdout.strip() != ""

    def test_settings_set_then_get(self, daemon):
        socket_path, _ = daemon
        result = run_cli("settings", "set", "memory_depth", "2", "--socket", str(socket_path))
        assert result.returncode == 0, result.stderr
        result = run_cli("settings", "get", "memory_depth", "--socket", str(socket_path))
        assert result.stdout.strip() == "2"

    def test_settings_get_all_json(self, daemon):
        socket_path, _ = daemon
        result = run_cli("settings", "get", "--socket", str(socket_path))
        values = json.loads(result.stdout)
        assert values["persona"] == "critic"

    def test_invalid_setting_exit_2(self, daemon):
        socket_path, _ = daemon
        result = run_cli("settings", "set", "cycle.voice", "45s", "--socket", str(socket_path))
        assert result.returncode == 2

    def test_emoji_trigger(self, daemon):
        socket_path, _ = daemon
        result = run_cli("trigger", "--emoji", "--socket", str(socket_path))
        assert result.returncode == 0, result.stderr
        assert result.stdout.strip() != ""
