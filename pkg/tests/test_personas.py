import pytest

from quac.personas import (
    PersonaId,
    UnknownPersonaError,
    list_personas,
    resolve,
    with_voice_overrides,
)

from . import golden

EXPECTED_ORDER = [
    "mentor",
    "cheerleader",
    "critic",
    "designer",
    "analyst",
    "ceo",
    "friend",
    "no_persona",
]


def test_catalog_has_eight_in_display_order():
    ids = [p.id.value for p in list_personas()]
    assert ids == EXPECTED_ORDER
    assert ids[0] == "mentor" and ids[-1] == "no_persona"


def test_catalog_stable_across_calls():
    assert list_personas() == list_personas()


def test_no_duplicate_ids_and_full_coverage():
    ids = [p.id for p in list_personas()]
    assert len(set(ids)) == 8
    assert set(ids) == set(PersonaId)


@pytest.mark.parametrize("pid", list(PersonaId))
def test_resolve_round_trip(pid):
    assert resolve(pid).id == pid


@pytest.mark.parametrize("pid", EXPECTED_ORDER)
def test_personality_prompts_verbatim(pid):
    assert resolve(pid).personality_prompt == golden.PERSONALITY[pid]


@pytest.mark.parametrize("pid", EXPECTED_ORDER)
def test_voice_defaults(pid):
    voice = resolve(pid).voice
    expected_id, expected_desc = golden.VOICES[pid]
    assert voice.provider_voice_id == expected_id
    assert voice.description == expected_desc


def test_critic_voice_description():
    assert resolve("critic").voice.description == "Non-binary, English, Sassy"


def test_mentor_voice_id():
    assert resolve("mentor").voice.provider_voice_id == "cgSgspJ2msm6clMCkdW9"


def test_no_persona_prompt():
    assert resolve("no_persona").personality_prompt == (
        "Imagine you are an AI. Do not pretend to be a person. "
        "Just give factual feedback plainly."
    )


def test_unknown_persona_rejected():
    with pytest.raises(UnknownPersonaError):
        resolve("GRUMPY_DUCK")


def test_parse_is_case_insensitive():
    assert PersonaId.parse("  CRITIC ") is PersonaId.CRITIC


def test_every_prompt_begins_imagine_you_are():
    for p in list_personas():
        assert p.personality_prompt.startswith("Imagine you are")


def test_axis_assignment():
    axes = {p.id.value: p.axis for p in list_personas()}
    assert {k for k, v in axes.items() if v == "positivity"} == {"mentor", "cheerleader", "critic"}
    assert {k for k, v in axes.items() if v == "design_aspect"} == {"designer", "analyst", "ceo"}
    assert {k for k, v in axes.items() if v == "humanness"} == {"friend", "no_persona"}


def test_voice_override_swaps_id_only():
    table = with_voice_overrides({"critic": "custom-voice-id"})
    assert table[PersonaId.CRITIC].voice.provider_voice_id == "custom-voice-id"
    assert table[PersonaId.CRITIC].voice.description == "Non-binary, English, Sassy"
    # registry itself untouched
    assert resolve("critic").voice.provider_voice_id == "O7p2vmz2iEYgMXxkbsif"


def test_voice_override_unknown_persona():
    with pytest.raises(UnknownPersonaError):
        with_voice_overrides({"duckzilla": "x"})
