"""Live configuration: validation, persistence, and change notification.

Settings are a flat key/value surface with closed domains; the config file is
a plain `key = value` text file so it stays hand-editable.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .capture import CaptureMode
from .personas import PersonaId
from .scheduler import CYCLE_VALUES, HotkeyBinding


class SettingsError(ValueError):
    pass


@dataclass
class Settings:
    persona: PersonaId = PersonaId.MENTOR
    capture_mode: CaptureMode = CaptureMode.WHOLE_SCREEN
    cursor_region: tuple[int, int] = (1024, 768)
    cycle_voice: str = "3m"
    cycle_emoji: str = "off"
    memory_depth: int = 2
    hotkeys: HotkeyBinding = field(default_factory=HotkeyBinding)

    def as_dict(self) -> dict:
        return {
            "persona": self.persona.value,
            "capture.mode": self.capture_mode.value,
            "capture.cursor_region": f"{self.cursor_region[0]}x{self.cursor_region[1]}",
            "cycle.voice": self.cycle_voice,
            "cycle.emoji": self.cycle_emoji,
            "memory_depth": self.memory_depth,
            "hotkeys.feedback": self.hotkeys.feedback,
            "hotkeys.emoji": self.hotkeys.emoji,
        }


def _parse_region(value: str) -> tuple[int, int]:
    try:
        w, h = value.lower().split("x")
        w, h = int(w), int(h)
    except ValueError:
        raise SettingsError(f"cursor_region must look like 1024x768, got {value!r}") from None
    if w <= 0 or h <= 0:
        raise SettingsError("cursor_region dimensions must be positive")
    return (w, h)


def _parse_depth(value) -> int:
    try:
        n = int(value)
    except (TypeError, ValueError):
        raise SettingsError(f"memory_depth must be an integer, got {value!r}") from None
    if n < 0:
        raise SettingsError("memory_depth must be >= 0")
    return n


def _parse_cycle(value: str) -> str:
    if value not in CYCLE_VALUES:
        raise SettingsError(
            f"cycle value must be one of {sorted(CYCLE_VALUES)}, got {value!r}"
        )
    return value


def apply_setting(settings: Settings, key: str, value) -> Settings:
    """Validate and apply one key; returns the mutated settings object."""
    if key == "persona":
        try:
            settings.persona = PersonaId.parse(str(value))
        except ValueError as exc:
            raise SettingsError(str(exc)) from None
    elif key == "capture.mode":
        try:
            settings.capture_mode = CaptureMode.parse(str(value))
        except ValueError as exc:
            raise SettingsError(str(exc)) from None
    elif key == "capture.cursor_region":
        settings.cursor_region = _parse_region(str(value))
    elif key == "cycle.voice":
        settings.cycle_voice = _parse_cycle(str(value))
    elif key == "cycle.emoji":
        settings.cycle_emoji = _parse_cycle(str(value))
    elif key == "memory_depth":
        settings.memory_depth = _parse_depth(value)
    elif key == "hotkeys.feedback":
        settings.hotkeys = HotkeyBinding(feedback=str(value), emoji=settings.hotkeys.emoji)
    elif key == "hotkeys.emoji":
        settings.hotkeys = HotkeyBinding(feedback=settings.hotkeys.feedback, emoji=str(value))
    else:
        raise SettingsError(f"unknown setting: {key!r}")
    return settings


# Backend wiring lives in the same config file but outside the live-settings
# domain (not settable over IPC).
PROVIDER_KEYS = {
    "provider",
    "vision.endpoint",
    "vision.model",
    "vision.timeout",
    "tts.endpoint",
    "tts.timeout",
}


def load_config(path: Path) -> tuple[Settings, dict[str, str]]:
    """Parse the config file into live settings plus provider extras."""
    settings = Settings()
    extras: dict[str, str] = {}
    if not path.exists():
        return settings, extras
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SettingsError(f"{path}:{lineno}: expected `key = value`")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in PROVIDER_KEYS or key.startswith("voice."):
            extras[key] = value
        else:
            apply_setting(settings, key, value)
    return settings, extras


def load_settings(path: Path) -> Settings:
    return load_config(path)[0]


def save_settings(settings: Settings, path: Path, extras: dict[str, str] | None = None) -> None:
    items = dict(settings.as_dict())
    if extras:
        items.update(extras)
    lines = [f"{k} = {v}" for k, v in items.items()]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def default_config_path() -> Path:
    base = os.environ.get("XDG_CONFIG_HOME") or str(Path.home() / ".config")
    return Path(base) / "quac" / "config"


class SettingsStore:
    """Thread-safe settings owner; persists on change and notifies listeners."""

    def __init__(
        self,
        settings: Settings,
        path: Path | None = None,
        extras: dict[str, str] | None = None,
    ):
        self._settings = settings
        self._path = path
        self._extras = extras or {}
        self._lock = threading.RLock()
        self._listeners: list[Callable[[str, object, object], None]] = []

    def on_change(self, listener: Callable[[str, object, object], None]):
        self._listeners.append(listener)

    def get(self) -> Settings:
        with self._lock:
            return self._settings

    def snapshot(self) -> dict:
        with self._lock:
            return self._settings.as_dict()

    def set(self, key: str, value) -> None:
        with self._lock:
            before = self._settings.as_dict().get(key)
            apply_setting(self._settings, key, value)
            after = self._settings.as_dict()[key]
            if self._path is not None:
                save_settings(self._settings, self._path, self._extras)
        for listener in self._listeners:
            listener(key, before, after)
