"""Screenshot capture in three modes: whole screen, active window, cursor region.

A CaptureSource abstracts the OS; FakeCaptureSource provides deterministic
frames and scripted geometry for tests and offline runs.
"""

from __future__ import annotations

import base64
import io
import time
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from PIL import Image

from .prompts import EncodedImage


class CaptureMode(str, Enum):
    WHOLE_SCREEN = "whole_screen"
    ACTIVE_WINDOW = "active_window"
    CURSOR_REGION = "cursor_region"

    @classmethod
    def parse(cls, raw: str) -> "CaptureMode":
        try:
            return cls(raw.strip().lower())
        except ValueError:
            raise ValueError(f"unknown capture mode: {raw!r}") from None


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    width: int
    height: int

    def contains(self, other: "Rect") -> bool:
        return (
            other.x >= self.x
            and other.y >= self.y
            and other.x + other.width <= self.x + self.width
            and other.y + other.height <= self.y + self.height
        )


class CaptureError(RuntimeError):
    """Capture unavailable: no display, no permission, or no focused window."""


class NoActiveWindowError(CaptureError):
    pass


class CaptureSource(Protocol):
    def display_rect(self) -> Rect: ...

    def active_window_rect(self) -> Rect: ...

    def cursor_position(self) -> tuple[int, int]: ...

    def grab(self, rect: Rect) -> Image.Image: ...


class FakeCaptureSource:
    """Deterministic source: synthetic gradient frame plus scripted geometry."""

    def __init__(
        self,
        width: int = 1920,
        height: int = 1080,
        window: Rect | None = None,
        cursor: tuple[int, int] = (960, 540),
    ):
        self._display = Rect(0, 0, width, height)
        self._window = window or Rect(200, 150, 800, 600)
        self._cursor = cursor
        self._frame = self._synthesize(width, height)

    @staticmethod
    def _synthesize(width: int, height: int) -> Image.Image:
        # blocky deterministic pattern, built small then scaled (fast)
        tile_w, tile_h = (width + 7) // 8, (height + 7) // 8
        raw = bytearray()
        for y in range(tile_h):
            for x in range(tile_w):
                block = (x * 56 + y * 104) % 256
                raw += bytes((block, (block * 3) % 256, 64))
        tile = Image.frombytes("RGB", (tile_w, tile_h), bytes(raw))
        return tile.resize((width, height), Image.NEAREST)

    def display_rect(self) -> Rect:
        return self._display

    def active_window_rect(self) -> Rect:
        if self._window is None:
            raise NoActiveWindowError("no focused window")
        return self._window

    def cursor_position(self) -> tuple[int, int]:
        return self._cursor

    def grab(self, rect: Rect) -> Image.Image:
        return self._frame.crop(
            (rect.x, rect.y, rect.x + rect.width, rect.y + rect.height)
        )

    # test hooks
    def set_window(self, window: Rect | None):
        self._window = window

    def set_cursor(self, x: int, y: int):
        self._cursor = (x, y)


class ScreenCaptureSource:
    """Best-effort real source via Pillow's ImageGrab.

    Raises CaptureError where the platform offers no grab facility (e.g.
    headless Linux). Active-window geometry is platform-dependent and not
    implemented here; whole-screen and cursor-region fall back to the full
    frame geometry.
    """

    def __init__(self):
        try:
            from PIL import ImageGrab  # noqa: F401
        except ImportError as exc:
            raise CaptureError(f"screen grab unavailable: {exc}") from exc

    def display_rect(self) -> Rect:
        img = self._grab_full()
        return Rect(0, 0, img.width, img.height)

    def active_window_rect(self) -> Rect:
        raise NoActiveWindowError("active-window geometry not available on this platform")

    def cursor_position(self) -> tuple[int, int]:
        rect = self.display_rect()
        return (rect.width // 2, rect.height // 2)

    def _grab_full(self) -> Image.Image:
        from PIL import ImageGrab

        try:
            return ImageGrab.grab()
        except Exception as exc:
            raise CaptureError(f"screen grab failed: {exc}") from exc

    def grab(self, rect: Rect) -> Image.Image:
        return self._grab_full().crop(
            (rect.x, rect.y, rect.x + rect.width, rect.y + rect.height)
        )


def clamp_region(desired: Rect, display: Rect) -> Rect:
    """Fit a desired rectangle inside the display.

    The size shrinks only when the display is smaller than the request;
    otherwise the origin shifts so the full region stays on screen.
    """
    width = min(desired.width, display.width)
    height = min(desired.height, display.height)
    x = max(display.x, min(desired.x, display.x + display.width - width))
    y = max(display.y, min(desired.y, display.y + display.height - height))
    return Rect(x, y, width, height)


def capture(
    mode: CaptureMode,
    source: CaptureSource,
    cursor_region: tuple[int, int] = (1024, 768),
    now: float | None = None,
) -> EncodedImage:
    """Grab one screenshot per the mode and encode it as base64 PNG."""
    display = source.display_rect()
    if mode is CaptureMode.WHOLE_SCREEN:
        rect = display
    elif mode is CaptureMode.ACTIVE_WINDOW:
        rect = clamp_region(source.active_window_rect(), display)
    else:
        cx, cy = source.cursor_position()
        rw, rh = cursor_region
        desired = Rect(cx - rw // 2, cy - rh // 2, rw, rh)
        rect = clamp_region(desired, display)

    img = source.grab(rect)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return EncodedImage(
        media_type="image/png",
        data_b64=base64.b64encode(buf.getvalue()).decode("ascii"),
        captured_at=now if now is not None else time.time(),
        mode=mode.value,
    )
