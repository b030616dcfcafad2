"""Wires settings, capture, providers, pipeline, scheduler, and IPC into a
running companion daemon."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path

from . import personas as persona_registry
from .capture import FakeCaptureSource, ScreenCaptureSource
from .ipc import IpcServer, default_socket_path
from .pipeline import AudioPlayer, Pipeline
from .providers import (
    HttpConfig,
    HttpTtsProvider,
    HttpVisionProvider,
    MockScript,
    MockTtsProvider,
    MockVisionProvider,
)
from .scheduler import CycleConfig, CycleScheduler, MonotonicClock, Trigger
from .session_log import SessionLogWriter
from .settings import Settings, SettingsStore

VISION_KEY_ENV = "QUAC_VISION_API_KEY"
TTS_KEY_ENV = "QUAC_TTS_API_KEY"


@dataclass
class DaemonOptions:
    socket_path: Path | None = None
    config_path: Path | None = None
    session_root: Path | None = None
    provider: str = "mock"  # mock | http
    capture_backend: str = "fake"  # fake | screen
    mock_vision_delay: float = 0.0
    mock_tts_delay: float = 0.0
    extras: dict | None = None


class Daemon:
    def __init__(self, settings: Settings, options: DaemonOptions):
        extras = options.extras or {}
        self.options = options
        self.settings = SettingsStore(settings, path=options.config_path, extras=extras)

        start_ts = time.time()
        session_root = options.session_root or Path.cwd() / "sessions"
        self.session_dir = session_root / f"session-{int(start_ts)}"
        self.session_dir.mkdir(parents=True, exist_ok=True)
        self.log = SessionLogWriter(
            self.session_dir / "events.jsonl",
            session_id=self.session_dir.name,
            start_ts=start_ts,
        )

        if options.capture_backend == "fake":
            self.source = FakeCaptureSource()
        else:
            self.source = ScreenCaptureSource()

        provider = options.provider or extras.get("provider", "mock")
        if provider == "mock":
            self.vision = MockVisionProvider(MockScript(delay_s=options.mock_vision_delay))
            self.tts = MockTtsProvider(delay_s=options.mock_tts_delay)
        else:
            self.vision = HttpVisionProvider(
                HttpConfig(
                    endpoint=extras.get("vision.endpoint", ""),
                    model=extras.get("vision.model", ""),
                    api_key=os.environ.get(VISION_KEY_ENV, ""),
                    timeout_s=float(extras.get("vision.timeout", 30.0)),
                )
            )
            self.tts = HttpTtsProvider(
                HttpConfig(
                    endpoint=extras.get("tts.endpoint", ""),
                    api_key=os.environ.get(TTS_KEY_ENV, ""),
                    timeout_s=float(extras.get("tts.timeout", 30.0)),
                )
            )

        voice_overrides = {
            key.removeprefix("voice."): value
            for key, value in extras.items()
            if key.startswith("voice.")
        }
        persona_table = persona_registry.with_voice_overrides(voice_overrides)

        self.socket_path = options.socket_path or default_socket_path()
        self.server = IpcServer(self.socket_path, None, self.settings)  # pipeline set below
        self.pipeline = Pipeline(
            settings=self.settings,
            source=self.source,
            vision=self.vision,
            tts=self.tts,
            log=self.log,
            emit=self.server.broadcast,
            session_dir=self.session_dir,
            persona_table=persona_table,
            player=AudioPlayer(),
        )
        self.server.pipeline = self.pipeline

        self.clock = MonotonicClock()
        cfg = self.settings.get()
        self.scheduler = CycleScheduler(
            CycleConfig(voice=cfg.cycle_voice, emoji=cfg.cycle_emoji),
            self.clock,
            sink=self._on_auto_trigger,
        )
        self.settings.on_change(self._on_setting_changed)

        import threading

        self._stop = threading.Event()
        self._sched_thread: threading.Thread | None = None

    def _on_auto_trigger(self, trigger: Trigger):
        self.pipeline.submit(trigger)

    def _on_setting_changed(self, key: str, old, new):
        if key == "memory_depth":
            self.pipeline.set_memory_depth(int(new))
        elif key == "cycle.voice":
            self.scheduler.set_interval("feedback", new)
        elif key == "cycle.emoji":
            self.scheduler.set_interval("emoji", new)
        self.log.append(
            {"type": "config_change", "timestamp": time.time(), "key": key, "old": old, "new": new}
        )

    def start(self):
        import threading

        self.pipeline.start()
        self.server.start()
        self._sched_thread = threading.Thread(
            target=self.scheduler.run, args=(self._stop,), daemon=True
        )
        self._sched_thread.start()

    def run_forever(self):
        self.start()
        try:
            self._stop.wait()
        except KeyboardInterrupt:
            pass
        finally:
            self.shutdown()

    def shutdown(self):
        self._stop.set()
        self.scheduler.stop()
        self.server.stop()
        self.pipeline.stop()
        try:
            self.log.close(end_ts=time.time())
        except Exception:
            pass
