import base64
import io

import pytest
from PIL import Image

from quac.capture import (
    CaptureMode,
    FakeCaptureSource,
    NoActiveWindowError,
    Rect,
    capture,
    clamp_region,
)


def decode(image):
    return Image.open(io.BytesIO(base64.b64decode(image.data_b64)))


def test_whole_screen_full_frame():
    src = FakeCaptureSource(1920, 1080)
    shot = capture(CaptureMode.WHOLE_SCREEN, src)
    assert decode(shot).size == (1920, 1080)
    assert shot.mode == "whole_screen"
    assert shot.media_type == "image/png"


def test_active_window_bounds():
    src = FakeCaptureSource(window=Rect(200, 150, 800, 600))
    shot = capture(CaptureMode.ACTIVE_WINDOW, src)
    assert decode(shot).size == (800, 600)


def test_active_window_missing():
    src = FakeCaptureSource(window=None)
    src.set_window(None)
    with pytest.raises(NoActiveWindowError):
        capture(CaptureMode.ACTIVE_WINDOW, src)


def test_cursor_region_clamped_to_origin():
    src = FakeCaptureSource(1920, 1080, cursor=(100, 100))
    shot = capture(CaptureMode.CURSOR_REGION, src, cursor_region=(1024, 768))
    img = decode(shot)
    assert img.size == (1024, 768)
    # clamp oracle: desired (100-512, 100-384, 1024x768) shifted to fit
    assert clamp_region(Rect(100 - 512, 100 - 384, 1024, 768), Rect(0, 0, 1920, 1080)) == Rect(
        0, 0, 1024, 768
    )


def test_cursor_region_centered_when_it_fits():
    src = FakeCaptureSource(1920, 1080, cursor=(960, 540))
    shot = capture(CaptureMode.CURSOR_REGION, src, cursor_region=(400, 300))
    assert decode(shot).size == (400, 300)


def test_cursor_region_shrinks_on_small_display():
    src = FakeCaptureSource(800, 600, cursor=(400, 300))
    shot = capture(CaptureMode.CURSOR_REGION, src, cursor_region=(1024, 768))
    assert decode(shot).size == (800, 600)


@pytest.mark.parametrize(
    "desired,display",
    [
        (Rect(-100, -100, 300, 300), Rect(0, 0, 1000, 1000)),
        (Rect(900, 900, 300, 300), Rect(0, 0, 1000, 1000)),
        (Rect(0, 0, 2000, 2000), Rect(0, 0, 1000, 500)),
        (Rect(500, 100, 100, 100), Rect(0, 0, 1000, 1000)),
    ],
)
def test_clamp_always_contained(desired, display):
    result = clamp_region(desired, display)
    assert display.contains(result)
    assert result.width == min(desired.width, display.width)
    assert result.height == min(desired.height, display.height)


def test_deterministic_encoding():
    a = capture(CaptureMode.WHOLE_SCREEN, FakeCaptureSource(640, 480))
    b = capture(CaptureMode.WHOLE_SCREEN, FakeCaptureSource(640, 480))
    assert a.data_b64 == b.data_b64


def test_capture_records_time_and_mode():
    shot = capture(CaptureMode.ACTIVE_WINDOW, FakeCaptureSource(), now=123.5)
    assert shot.captured_at == 123.5
    assert shot.mode == "active_window"
