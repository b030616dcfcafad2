"""Command line interface: daemon launcher plus thin socket clients.

Exit codes: 0 success, 1 generation/provider failure, 2 bad input,
3 daemon not running, 4 log parse error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import personas as persona_registry
from .daemon import Daemon, DaemonOptions
from .ipc import IpcClient, default_socket_path
from .session_log import LogError, analyze, render_timeline_svg, render_timeline_text, timeline
from .settings import SettingsError, default_config_path, load_config

EXIT_GENERATION_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NO_DAEMON = 3
EXIT_LOG_ERROR = 4


@click.group()
def main():
    """Ambient design-feedback companion."""


def _connect(socket_path: str | None) -> IpcClient:
    path = Path(socket_path) if socket_path else default_socket_path()
    try:
        return IpcClient(path)
    except (ConnectionRefusedError, FileNotFoundError, OSError):
        click.echo(f"daemon not running (no socket at {path})", err=True)
        sys.exit(EXIT_NO_DAEMON)


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--socket", "socket_path", type=click.Path(path_type=Path), default=None)
@click.option("--provider", type=click.Choice(["mock", "http"]), default=None)
@click.option("--capture", "capture_backend", type=click.Choice(["fake", "screen"]), default="fake")
@click.option("--session-dir", type=click.Path(path_type=Path), default=None)
@click.option("--mock-vision-delay", type=float, default=0.0)
@click.option("--mock-tts-delay", type=float, default=0.0)
def run(config_path, socket_path, provider, capture_backend, session_dir, mock_vision_delay, mock_tts_delay):
    """Start the companion daemon."""
    config_path = config_path or default_config_path()
    try:
        settings, extras = load_config(config_path)
    except SettingsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_BAD_INPUT)
    options = DaemonOptions(
        socket_path=socket_path,
        config_path=config_path,
        session_root=session_dir,
        provider=provider or extras.get("provider", "mock"),
        capture_backend=capture_backend,
        mock_vision_delay=mock_vision_delay,
        mock_tts_delay=mock_tts_delay,
        extras=extras,
    )
    daemon = Daemon(settings, options)
    click.echo(f"listening on {daemon.socket_path}", err=True)
    click.echo(f"session dir {daemon.session_dir}", err=True)
    daemon.run_forever()


@main.command()
@click.option("--persona", default=None, help="Override the active persona for this run.")
@click.option("--emoji", is_flag=True, help="Request emoji acknowledgment instead of voice feedback.")
@click.option("--socket", "socket_path", default=None)
@click.option("--timeout", type=float, default=30.0)
def trigger(persona, emoji, socket_path, timeout):
    """One-shot manual trigger against the running daemon."""
    client = _connect(socket_path)
    client.sock.settimeout(timeout)
    try:
        if emoji:
            reply = client.request("trigger_emoji")
        else:
            reply = client.request("trigger_feedback", persona=persona)
        if not reply.get("ok"):
            click.echo(reply.get("error", "rejected"), err=True)
            sys.exit(EXIT_BAD_INPUT)
        terminal = client.wait_event("FeedbackReady", "EmojiReady", "GenerationFailed")
        if terminal["event"] == "FeedbackReady":
            click.echo(terminal["text"])
        elif terminal["event"] == "EmojiReady":
            click.echo("".join(terminal["emojis"]))
        else:
            click.echo(f"generation failed: {terminal.get('status')}", err=True)
            sys.exit(EXIT_GENERATION_FAILED)
    finally:
        client.close()


@main.group()
def settings():
    """Read or change live settings on the running daemon."""


@settings.command("get")
@click.argument("key", required=False)
@click.option("--socket", "socket_path", default=None)
def settings_get(key, socket_path):
    client = _connect(socket_path)
    try:
        reply = client.request("get_settings")
        values = reply["result"]["settings"]
        if key:
            if key not in values:
                click.echo(f"unknown setting: {key}", err=True)
                sys.exit(EXIT_BAD_INPUT)
            click.echo(values[key])
        else:
            click.echo(json.dumps(values, indent=2))
    finally:
        client.close()


@settings.command("set")
@click.argument("key")
@click.argument("value")
@click.option("--socket", "socket_path", default=None)
def settings_set(key, value, socket_path):
    client = _connect(socket_path)
    try:
        reply = client.request("set_setting", key=key, value=value)
        if not reply.get("ok"):
            click.echo(reply.get("error"), err=True)
            sys.exit(EXIT_BAD_INPUT)
        click.echo(reply["result"]["settings"][key])
    finally:
        client.close()


@main.command()
def personas():
    """Dump the persona catalog as JSON."""
    click.echo(json.dumps([p.as_dict() for p in persona_registry.list_personas()], indent=2))


@main.command("analyze")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Emit stats as JSON.")
@click.option("--svg", "svg_out", type=click.Path(path_type=Path), default=None)
def analyze_cmd(files, as_json, svg_out):
    """Usage statistics and timelines over session log files."""
    try:
        stats = analyze(files)
        timelines = [timeline(f) for f in files]
    except LogError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_LOG_ERROR)
    if svg_out:
        svg_out.write_text(render_timeline_svg(timelines))
        click.echo(f"wrote {svg_out}", err=True)
    if as_json:
        click.echo(json.dumps(stats.as_dict(), indent=2))
        return
    d = stats.as_dict()
    click.echo(f"sessions:           {d['session_count']}")
    click.echo(f"feedback requests:  {d['total_requests']}")
    click.echo(f"  manual:           {d['manual_total']}")
    click.echo(f"  auto:             {d['auto_total']}")
    click.echo(f"mean per session:   {d['mean_total_per_session']:.2f}")
    click.echo(f"mean manual/sess:   {d['mean_manual_per_session']:.2f}")
    if d["persona_totals"]:
        click.echo("persona totals:")
        for persona, n in sorted(d["persona_totals"].items(), key=lambda kv: -kv[1]):
            click.echo(f"  {persona:<12} {n}")
    if d["manual_persona_totals"]:
        click.echo("manually requested personas:")
        for persona, n in sorted(d["manual_persona_totals"].items(), key=lambda kv: -kv[1]):
            click.echo(f"  {persona:<12} {n}")
    click.echo("")
    click.echo(render_timeline_text(timelines))


if __name__ == "__main__":
    main()
