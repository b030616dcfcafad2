"""Vision-LLM and TTS provider clients, plus deterministic offline mocks.

All network I/O in the package lives here. HTTP clients speak an OpenAI-style
chat-completions shape for vision and a plain JSON POST for TTS; both are
configuration-driven so backends stay interchangeable.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import httpx

from .personas import VoiceDescriptor
from .prompts import PromptPayload

ERROR_KINDS = frozenset(
    {"network", "timeout", "auth", "rate_limited", "malformed_reply", "empty_audio", "server_error"}
)

RETRY_BACKOFF_S = 2.0


class ProviderError(RuntimeError):
    def __init__(self, kind: str, message: str, status: int | None = None):
        assert kind in ERROR_KINDS, kind
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.status = status

    @property
    def retriable(self) -> bool:
        return self.kind in ("rate_limited", "network")


class RunCancelled(RuntimeError):
    """Raised inside a provider call when the run's cancel flag fires."""


@dataclass(frozen=True)
class AudioClip:
    media_type: str
    data: bytes
    duration_s: float


@dataclass
class HttpConfig:
    endpoint: str
    api_key: str = ""
    model: str = ""
    timeout_s: float = 30.0


class VisionProvider(Protocol):
    def complete(self, payload: PromptPayload, cancel: threading.Event | None = None) -> str: ...


class TtsProvider(Protocol):
    def synthesize(
        self, text: str, voice: VoiceDescriptor, cancel: threading.Event | None = None
    ) -> AudioClip: ...


def build_vision_request(payload: PromptPayload, cfg: HttpConfig) -> dict:
    """Serialize a payload into one chat request; pure in (payload, cfg)."""
    content: list[dict] = []
    for part in payload.text_parts:
        content.append({"type": "text", "text": part})
    for img in payload.image_parts:
        content.append(
            {
                "type": "image_url",
                "image_url": {"url": f"data:{img.media_type};base64,{img.data_b64}"},
            }
        )
    return {
        "model": cfg.model,
        "messages": [{"role": "user", "content": content}],
        "max_tokens": 300,
    }


def _classify_status(status: int, body: str) -> ProviderError:
    if status in (401, 403):
        return ProviderError("auth", f"HTTP {status}", status)
    if status == 429:
        return ProviderError("rate_limited", f"HTTP {status}", status)
    if status >= 500:
        return ProviderError("server_error", f"HTTP {status}", status)
    return ProviderError("server_error", f"HTTP {status}: {body[:200]}", status)


def _post_with_retry(
    url: str,
    cfg: HttpConfig,
    *,
    json_body: dict,
    retry: bool,
    cancel: threading.Event | None,
    sleep: Callable[[float], None] = time.sleep,
) -> httpx.Response:
    attempts = 2 if retry else 1
    last: ProviderError | None = None
    headers = {}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"
    for attempt in range(attempts):
        if cancel is not None and cancel.is_set():
            raise RunCancelled()
        try:
            resp = httpx.post(url, json=json_body, headers=headers, timeout=cfg.timeout_s)
        except httpx.TimeoutException as exc:
            raise ProviderError("timeout", str(exc)) from exc
        except httpx.HTTPError as exc:
            last = ProviderError("network", str(exc))
        else:
            if resp.status_code == 200:
                return resp
            last = _classify_status(resp.status_code, resp.text)
        if attempt + 1 < attempts and last.retriable:
            sleep(RETRY_BACKOFF_S)
        elif not last.retriable:
            break
    raise last


class HttpVisionProvider:
    def __init__(self, cfg: HttpConfig, retry: bool = True, sleep=time.sleep):
        self.cfg = cfg
        self.retry = retry
        self._sleep = sleep

    def complete(self, payload: PromptPayload, cancel: threading.Event | None = None) -> str:
        body = build_vision_request(payload, self.cfg)
        resp = _post_with_retry(
            self.cfg.endpoint,
            self.cfg,
            json_body=body,
            retry=self.retry,
            cancel=cancel,
            sleep=self._sleep,
        )
        try:
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError("malformed_reply", f"unexpected reply shape: {exc}") from exc


class HttpTtsProvider:
    def __init__(self, cfg: HttpConfig, retry: bool = True, sleep=time.sleep):
        self.cfg = cfg
        self.retry = retry
        self._sleep = sleep

    def synthesize(
        self, text: str, voice: VoiceDescriptor, cancel: threading.Event | None = None
    ) -> AudioClip:
        if not text:
            raise ValueError("cannot synthesize empty text")
        body = {"text": text, "voice_id": voice.provider_voice_id}
        resp = _post_with_retry(
            self.cfg.endpoint,
            self.cfg,
            json_body=body,
            retry=self.retry,
            cancel=cancel,
            sleep=self._sleep,
        )
        if not resp.content:
            raise ProviderError("empty_audio", "zero-length audio body")
        media_type = resp.headers.get("content-type", "audio/mpeg").split(";")[0]
        return AudioClip(media_type, resp.content, estimate_duration_s(text))


def estimate_duration_s(text: str) -> float:
    # ~150 wpm speech rate
    return max(0.5, len(text.split()) / 2.5)


# Stock offline replies, keyed by the opening sentence of each personality
# prompt, so the mock daemon answers in character.
CANNED_REPLIES = {
    "Imagine you are an empathetic mentor.": (
        "It's encouraging to see your 3D modeling skills applied! You've achieved "
        "a clean, cozy aesthetic for your EggChair. For enhancement, consider "
        "refining the base to ensure stability and make it as elegant as the rest "
        "of the design. Keep up the innovative work!"
    ),
    "Imagine you are a cheerleader, this person's number one fan.": (
        "Wow, your 3D modeling skills are impressive! That egg chair design is "
        "sleek and modern - absolutely stunning work! Maybe consider adding some "
        "textures or details to give it even more character! Keep shining, "
        "superstar!"
    ),
    "Imagine you are a grumpy old design critic.": (
        "The overall form is too simplistic and pedestrian. The base looks bulky "
        "and improperly balanced with the shell. Rethink the aesthetics and "
        "functional design of the base for better visual harmony and stability. "
        "Add textural elements or ergonomic features."
    ),
    "Imagine you are an analytical pragmatist.": (
        "The CAD design displays a clean, organic shape, suggesting good "
        "ergonomic consideration. For improvement, apply material stress analysis "
        "to ensure functionality matches form. Note: I'm unable to provide "
        "specific feedback on the progression of work without multiple images "
        "showing changes over time."
    ),
    "Imagine you are a direct, critical, visionary.": (
        "The chair's organic shape is intriguing, but it needs "
        "refinement—consider the user's comfort and add cushions or ergonomic "
        "features to transcend mere aesthetics."
    ),
    "Imagine you are a grand artist.": (
        "Ah, a digital sculptor's egg! The curves and contours of your creation "
        "whisper the promise of comfort and seclusion. For a touch of finesse, "
        "consider playing with texture to tease the senses, making the visual "
        "dance with the tactile."
    ),
    "Imagine you are in your girlboss era.": (
        "Honey, that's one sleek egg chair design you've whipped up in "
        "Fusion—modern vibe check passed! Maybe give it a pop of color to make it "
        "truly iconic? Shine on!"
    ),
    "Imagine you are an AI.": (
        "The 3D model appears well-constructed with smooth surfaces. For "
        "improvement, consider adding textures or colors to enhance visual "
        "appeal."
    ),
}


@dataclass
class MockScript:
    """Canned replies keyed by (persona marker, payload digest).

    Persona marker is the first word triple of the personality prompt, so
    scripts can key on persona without importing the registry. Fallback
    replies derive deterministically from the digest.
    """

    replies: dict[str, str] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)  # digest -> error kind
    delay_s: float = 0.0


class MockVisionProvider:
    def __init__(self, script: MockScript | None = None):
        self.script = script or MockScript()
        self.calls: list[PromptPayload] = []

    def complete(self, payload: PromptPayload, cancel: threading.Event | None = None) -> str:
        self.calls.append(payload)
        _mock_wait(self.script.delay_s, cancel)
        digest = payload.digest()
        if digest in self.script.failures:
            raise ProviderError(self.script.failures[digest], "scripted failure")
        if "__any__" in self.script.failures:
            raise ProviderError(self.script.failures["__any__"], "scripted failure")
        if payload.kind == "emoji":
            return self.script.replies.get("emoji", "🥚🪑❤️🎉👏")
        persona_key = payload.text_parts[0]
        for key, reply in self.script.replies.items():
            if key and persona_key.startswith(key):
                return reply
        if digest in self.script.replies:
            return self.script.replies[digest]
        for opener, reply in CANNED_REPLIES.items():
            if persona_key.startswith(opener):
                return reply
        seed = hashlib.sha256(digest.encode()).hexdigest()[:8]
        return f"Solid progress on the current pass ({seed}). Consider tightening the weakest area next."


class MockTtsProvider:
    def __init__(self, delay_s: float = 0.0, fail_kind: str | None = None):
        self.delay_s = delay_s
        self.fail_kind = fail_kind
        self.calls: list[tuple[str, str]] = []

    def synthesize(
        self, text: str, voice: VoiceDescriptor, cancel: threading.Event | None = None
    ) -> AudioClip:
        if not text:
            raise ValueError("cannot synthesize empty text")
        self.calls.append((text, voice.provider_voice_id))
        _mock_wait(self.delay_s, cancel)
        if self.fail_kind:
            raise ProviderError(self.fail_kind, "scripted failure")
        # silent placeholder mp3: size scales with text length
        data = b"\xff\xfb\x90\x00" + b"\x00" * (4 * len(text))
        return AudioClip("audio/mpeg", data, estimate_duration_s(text))


def _mock_wait(delay_s: float, cancel: threading.Event | None):
    if delay_s <= 0:
        if cancel is not None and cancel.is_set():
            raise RunCancelled()
        return
    if cancel is None:
        time.sleep(delay_s)
    elif cancel.wait(delay_s):
        raise RunCancelled()
