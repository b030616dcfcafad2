"""One feedback or emoji cycle, end to end.

capture -> prompt -> vision -> (TTS) -> deliver -> remember -> log.

The pipeline enforces single-flight: at most one generation at a time. A
manual trigger during flight cancels and replaces the running one; an auto
tick during flight is dropped. Every run, whatever its outcome, produces
exactly one log record.
"""

from __future__ import annotations

import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import personas as persona_registry
from .capture import CaptureError, CaptureMode, CaptureSource, capture
from .personas import Persona, PersonaId
from .prompts import (
    EmojiValidationError,
    EncodedImage,
    MemorySnapshot,
    assemble_emoji,
    assemble_feedback,
    validate_emoji_reply,
)
from .providers import AudioClip, ProviderError, RunCancelled, TtsProvider, VisionProvider
from .scheduler import Trigger
from .session_log import SessionLogWriter
from .settings import SettingsStore


@dataclass
class FeedbackEvent:
    event_id: str
    timestamp: float
    trigger: str  # manual | auto
    kind: str  # feedback | emoji
    persona: str
    capture_mode: str | None = None
    memory_depth_used: int = 0
    prompt_digest: str | None = None
    reply_text: str | None = None
    emojis: tuple[str, ...] | None = None
    word_count: int | None = None
    audio_ref: str | None = None
    latency_ms: int | None = None
    status: str = "ok"
    error_kind: str | None = None

    def as_record(self) -> dict:
        rec = {
            "type": "feedback_event",
            "event_id": self.event_id,
            "timestamp": self.timestamp,
            "trigger": self.trigger,
            "kind": self.kind,
            "persona": self.persona,
            "capture_mode": self.capture_mode,
            "memory_depth_used": self.memory_depth_used,
            "prompt_digest": self.prompt_digest,
            "status": self.status,
            "latency_ms": self.latency_ms,
        }
        if self.reply_text is not None:
            rec["reply_text"] = self.reply_text
        if self.emojis is not None:
            rec["emojis"] = list(self.emojis)
        if self.word_count is not None:
            rec["word_count"] = self.word_count
        if self.audio_ref is not None:
            rec["audio_ref"] = self.audio_ref
        if self.error_kind is not None:
            rec["error_kind"] = self.error_kind
        return rec


class MemoryBuffer:
    """Bounded FIFO of (feedback text, screenshot) pairs. Emoji never enters."""

    def __init__(self, depth: int = 2):
        if depth < 0:
            raise ValueError("memory depth must be >= 0")
        self._depth = depth
        self._entries: deque[tuple[str, EncodedImage]] = deque()
        self._lock = threading.Lock()

    @property
    def depth(self) -> int:
        return self._depth

    def set_depth(self, depth: int):
        if depth < 0:
            raise ValueError("memory depth must be >= 0")
        with self._lock:
            self._depth = depth
            while len(self._entries) > depth:
                self._entries.popleft()

    def append(self, text: str, screenshot: EncodedImage):
        with self._lock:
            if self._depth == 0:
                return
            self._entries.append((text, screenshot))
            while len(self._entries) > self._depth:
                self._entries.popleft()

    def snapshot(self) -> MemorySnapshot:
        with self._lock:
            texts = tuple(t for t, _ in self._entries)
            shots = tuple(s for _, s in self._entries)
        return MemorySnapshot(feedback_texts=texts, screenshots=shots)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


class AudioPlayer:
    """Playback hook. The default implementation is silent: it reports the
    clip finished after an optional delay, and is stoppable."""

    def __init__(self, finish_delay_s: float = 0.0):
        self._delay = finish_delay_s
        self._timer: threading.Timer | None = None

    def play(self, clip: AudioClip, on_finished: Callable[[], None]):
        self.stop()
        if self._delay <= 0:
            on_finished()
            return
        self._timer = threading.Timer(self._delay, on_finished)
        self._timer.daemon = True
        self._timer.start()

    def stop(self):
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None


@dataclass
class _Job:
    kind: str  # feedback | emoji
    trigger: str  # manual | auto
    persona_override: PersonaId | None = None


class Pipeline:
    def __init__(
        self,
        settings: SettingsStore,
        source: CaptureSource,
        vision: VisionProvider,
        tts: TtsProvider,
        log: SessionLogWriter | None = None,
        emit: Callable[[dict], None] | None = None,
        session_dir: Path | None = None,
        persona_table: dict[PersonaId, Persona] | None = None,
        player: AudioPlayer | None = None,
        history_limit: int = 50,
    ):
        self.settings = settings
        self.source = source
        self.vision = vision
        self.tts = tts
        self.log = log
        self.session_dir = Path(session_dir) if session_dir else None
        self.memory = MemoryBuffer(settings.get().memory_depth)
        self._emit = emit or (lambda event: None)
        self._personas = persona_table or {p.id: p for p in persona_registry.list_personas()}
        self._player = player or AudioPlayer()
        self.history: deque[FeedbackEvent] = deque(maxlen=history_limit)

        self._state = threading.Lock()  # guards _busy/_cancel/_pending
        self._busy = False
        self._cancel: threading.Event | None = None
        self._pending: _Job | None = None
        self._wakeup = threading.Condition(self._state)
        self._worker: threading.Thread | None = None
        self._stopping = False

    # -- synchronous entry points -------------------------------------------

    def run_feedback(self, trigger: str, persona_override: PersonaId | None = None) -> FeedbackEvent:
        return self._run(_Job("feedback", trigger, persona_override))

    def run_emoji(self, trigger: str) -> FeedbackEvent:
        return self._run(_Job("emoji", trigger))

    def _run(self, job: _Job) -> FeedbackEvent:
        cancel = threading.Event()
        with self._state:
            while self._busy:
                self._wakeup.wait()
            self._busy = True
            self._cancel = cancel
        try:
            return self._execute(job, cancel)
        finally:
            with self._state:
                self._busy = False
                self._cancel = None
                self._wakeup.notify_all()

    def cancel_in_flight(self) -> bool:
        with self._state:
            cancel = self._cancel if self._busy else None
        self._player.stop()
        if cancel is None:
            return False
        cancel.set()
        return True

    def set_memory_depth(self, depth: int):
        self.memory.set_depth(depth)

    def snapshot_memory(self) -> MemorySnapshot:
        return self.memory.snapshot()

    # -- queued entry points (scheduler / hotkeys / IPC) ---------------------

    def start(self):
        self._worker = threading.Thread(target=self._worker_loop, daemon=True)
        self._worker.start()

    def stop(self):
        with self._state:
            self._stopping = True
            if self._cancel is not None:
                self._cancel.set()
            self._wakeup.notify_all()
        if self._worker is not None:
            self._worker.join(timeout=5)

    def submit(self, trigger: Trigger, persona_override: PersonaId | None = None) -> bool:
        """Queue a run. Manual wins: cancels in-flight work and replaces any
        pending job. Auto ticks are dropped when anything is running/pending."""
        job = _Job(trigger.kind, trigger.source, persona_override)
        with self._state:
            if trigger.source == "auto":
                if self._busy or self._pending is not None:
                    return False
                self._pending = job
            else:
                if self._cancel is not None:
                    self._cancel.set()
                self._pending = job
            self._wakeup.notify_all()
        if trigger.source == "manual":
            self._player.stop()
        return True

    def _worker_loop(self):
        while True:
            with self._state:
                while self._pending is None and not self._stopping:
                    self._wakeup.wait()
                if self._stopping:
                    return
                job = self._pending
                self._pending = None
                self._busy = True
                cancel = threading.Event()
                self._cancel = cancel
            try:
                self._execute(job, cancel)
            finally:
                with self._state:
                    self._busy = False
                    self._cancel = None
                    self._wakeup.notify_all()

    # -- the cycle ------------------------------------------------------------

    def _execute(self, job: _Job, cancel: threading.Event) -> FeedbackEvent:
        t0 = time.monotonic()
        cfg = self.settings.get()
        persona = self._personas[job.persona_override or cfg.persona]
        event = FeedbackEvent(
            event_id=uuid.uuid4().hex[:12],
            timestamp=time.time(),
            trigger=job.trigger,
            kind=job.kind,
            persona=persona.id.value,
            capture_mode=cfg.capture_mode.value,
            memory_depth_used=self.memory.depth,
        )
        self._emit(
            {"event": "GenerationStarted", "kind": job.kind, "persona": persona.id.value}
        )
        try:
            shot = capture(cfg.capture_mode, self.source, cfg.cursor_region)
        except CaptureError as exc:
            event.status = "capture_skipped"
            # auto ticks fail silently; manual gets a UI notice
            self._fail(event, silent=(job.trigger == "auto"), message=str(exc))
            return self._finish(event, t0)

        if job.kind == "emoji":
            payload = assemble_emoji(shot)
        else:
            payload = assemble_feedback(persona, shot, self.memory.snapshot())
        event.prompt_digest = payload.digest()

        try:
            reply = self.vision.complete(payload, cancel=cancel)
        except RunCancelled:
            event.status = "cancelled"
            self._fail(event, silent=True)
            return self._finish(event, t0)
        except ProviderError as exc:
            event.status = "provider_error"
            event.error_kind = exc.kind
            self._fail(event, message=str(exc))
            return self._finish(event, t0)

        if job.kind == "emoji":
            return self._finish_emoji(event, reply, t0)
        return self._finish_feedback(event, persona, shot, reply, cancel, t0)

    def _finish_emoji(self, event: FeedbackEvent, reply: str, t0: float) -> FeedbackEvent:
        try:
            emojis = validate_emoji_reply(reply)
        except EmojiValidationError:
            event.status = "emoji_rejected"
            event.reply_text = reply
            self._fail(event, silent=True)
            return self._finish(event, t0)
        event.emojis = emojis
        event.latency_ms = int((time.monotonic() - t0) * 1000)
        # log before emitting so clients reacting to the event see the record
        self._finish(event, t0, keep_latency=True)
        self._emit({"event": "EmojiReady", "emojis": list(emojis)})
        return event

    def _finish_feedback(
        self,
        event: FeedbackEvent,
        persona: Persona,
        shot: EncodedImage,
        reply: str,
        cancel: threading.Event,
        t0: float,
    ) -> FeedbackEvent:
        event.reply_text = reply
        event.word_count = len(reply.split())
        try:
            clip = self.tts.synthesize(reply, persona.voice, cancel=cancel)
        except RunCancelled:
            event.status = "cancelled"
            self._fail(event, silent=True)
            return self._finish(event, t0)
        except ProviderError as exc:
            event.status = "provider_error"
            event.error_kind = exc.kind
            self._fail(event, message=str(exc))
            return self._finish(event, t0)

        event.latency_ms = int((time.monotonic() - t0) * 1000)
        if self.session_dir is not None:
            audio_dir = self.session_dir / "audio"
            audio_dir.mkdir(parents=True, exist_ok=True)
            audio_path = audio_dir / f"{event.event_id}.mp3"
            audio_path.write_bytes(clip.data)
            event.audio_ref = str(audio_path)

        self.memory.append(reply, shot)
        # log before emitting so clients reacting to the event see the record
        self._finish(event, t0, keep_latency=True)
        self._emit(
            {
                "event": "FeedbackReady",
                "event_id": event.event_id,
                "persona": event.persona,
                "text": reply,
                "audio_duration": clip.duration_s,
            }
        )
        event_id = event.event_id
        self._player.play(
            clip,
            lambda: self._emit({"event": "PlaybackFinished", "event_id": event_id}),
        )
        return event

    def _fail(self, event: FeedbackEvent, silent: bool = False, message: str | None = None):
        payload = {"event": "GenerationFailed", "status": event.status, "silent": silent}
        if event.error_kind:
            payload["error_kind"] = event.error_kind
        if message and not silent:
            payload["message"] = message
        self._emit(payload)

    def _finish(self, event: FeedbackEvent, t0: float, keep_latency: bool = False) -> FeedbackEvent:
        if not keep_latency:
            event.latency_ms = int((time.monotonic() - t0) * 1000)
        # log timestamp = completion time, so interleaved config-change
        # records can never violate file monotonicity
        event.timestamp = time.time()
        if self.log is not None:
            self.log.append(event.as_record())
        self.history.append(event)
        return event
