import pytest
from hypothesis import given, strategies as st

from quac.capture import CaptureMode
from quac.personas import PersonaId
from quac.settings import (
    Settings,
    SettingsError,
    SettingsStore,
    apply_setting,
    load_config,
    save_settings,
)

PERSONAS = [p.value for p in PersonaId]
MODES = [m.value for m in CaptureMode]
CYCLES = ["off", "30s", "3m", "5m"]


def test_defaults():
    s = Settings()
    assert s.persona is PersonaId.MENTOR
    assert s.memory_depth == 2
    assert s.cycle_voice == "3m"


@given(
    key_value=st.one_of(
        st.tuples(st.just("persona"), st.sampled_from(PERSONAS)),
        st.tuples(st.just("capture.mode"), st.sampled_from(MODES)),
        st.tuples(st.just("cycle.voice"), st.sampled_from(CYCLES)),
        st.tuples(st.just("cycle.emoji"), st.sampled_from(CYCLES)),
        st.tuples(st.just("memory_depth"), st.integers(0, 20).map(str)),
    )
)
def test_round_trip_over_closed_domains(key_value):
    key, value = key_value
    s = Settings()
    apply_setting(s, key, value)
    assert s.as_dict()[key] == (int(value) if key == "memory_depth" else value)


@pytest.mark.parametrize(
    "key,value",
    [
        ("persona", "duckzilla"),
        ("capture.mode", "screencast"),
        ("cycle.voice", "45s"),
        ("cycle.emoji", "1h"),
        ("memory_depth", "-1"),
        ("memory_depth", "many"),
        ("capture.cursor_region", "wide"),
        ("capture.cursor_region", "0x0"),
        ("nonsense", "x"),
    ],
)
def test_invalid_values_rejected(key, value):
    with pytest.raises(SettingsError):
        apply_setting(Settings(), key, value)


def test_cursor_region_parse():
    s = Settings()
    apply_setting(s, "capture.cursor_region", "800x600")
    assert s.cursor_region == (800, 600)


def test_config_file_round_trip(tmp_path):
    s = Settings()
    apply_setting(s, "persona", "critic")
    apply_setting(s, "memory_depth", 4)
    path = tmp_path / "config"
    save_settings(s, path, extras={"provider": "mock", "vision.model": "test-model"})
    loaded, extras = load_config(path)
    assert loaded.persona is PersonaId.CRITIC
    assert loaded.memory_depth == 4
    assert extras["provider"] == "mock"
    assert extras["vision.model"] == "test-model"


def test_missing_config_gives_defaults(tmp_path):
    loaded, extras = load_config(tmp_path / "nope")
    assert loaded == Settings()
    assert extras == {}


def test_malformed_config_line(tmp_path):
    path = tmp_path / "config"
    path.write_text("persona critic\n")
    with pytest.raises(SettingsError, match=":1"):
        load_config(path)


def test_store_persists_and_notifies(tmp_path):
    path = tmp_path / "config"
    store = SettingsStore(Settings(), path=path, extras={"provider": "mock"})
    changes = []
    store.on_change(lambda k, old, new: changes.append((k, old, new)))
    store.set("persona", "designer")
    assert changes == [("persona", "mentor", "designer")]
    reloaded, extras = load_config(path)
    assert reloaded.persona is PersonaId.DESIGNER
    assert extras == {"provider": "mock"}  # extras survive persistence


def test_store_rejects_invalid_without_change(tmp_path):
    store = SettingsStore(Settings())
    with pytest.raises(SettingsError):
        store.set("cycle.voice", "45s")
    assert store.get().cycle_voice == "3m"
