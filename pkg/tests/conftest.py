import pytest

from quac.capture import CaptureMode, FakeCaptureSource, capture
from quac.personas import resolve
from quac.pipeline import AudioPlayer, Pipeline
from quac.providers import MockScript, MockTtsProvider, MockVisionProvider
from quac.session_log import SessionLogWriter
from quac.settings import Settings, SettingsStore

from . import golden


@pytest.fixture
def fake_source():
    return FakeCaptureSource()


@pytest.fixture
def shot(fake_source):
    return capture(CaptureMode.WHOLE_SCREEN, fake_source, now=100.0)


@pytest.fixture
def critic():
    return resolve("critic")


def make_pipeline(
    tmp_path,
    persona="critic",
    memory_depth=2,
    script=None,
    tts_delay=0.0,
    emit=None,
    log=True,
):
    settings = Settings()
    from quac.settings import apply_setting

    apply_setting(settings, "persona", persona)
    apply_setting(settings, "memory_depth", memory_depth)
    store = SettingsStore(settings)
    if script is None:
        script = MockScript(replies={"Imagine you are a grumpy old design critic.": golden.CRITIC_SAMPLE_REPLY})
    writer = None
    if log:
        writer = SessionLogWriter(tmp_path / "events.jsonl", session_id="test", start_ts=0.0)
    return Pipeline(
        settings=store,
        source=FakeCaptureSource(),
        vision=MockVisionProvider(script),
        tts=MockTtsProvider(delay_s=tts_delay),
        log=writer,
        emit=emit,
        session_dir=tmp_path,
        player=AudioPlayer(),
    )
