"""Built-in feedback personas: personality prompts, voices, and icon keys.

The catalog is compiled-in constant data. Voice ids default to the shipped
set but can be overridden per-persona through configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum


class PersonaId(str, Enum):
    MENTOR = "mentor"
    CHEERLEADER = "cheerleader"
    CRITIC = "critic"
    DESIGNER = "designer"
    ANALYST = "analyst"
    CEO = "ceo"
    FRIEND = "friend"
    NO_PERSONA = "no_persona"

    @classmethod
    def parse(cls, raw: str) -> "PersonaId":
        try:
            return cls(raw.strip().lower())
        except ValueError:
            raise UnknownPersonaError(raw) from None

    def __str__(self) -> str:
        return self.value


class UnknownPersonaError(ValueError):
    def __init__(self, raw: str):
        super().__init__(f"unknown persona: {raw!r}")
        self.raw = raw


@dataclass(frozen=True)
class VoiceDescriptor:
    provider_voice_id: str
    description: str


@dataclass(frozen=True)
class Persona:
    id: PersonaId
    display_name: str
    axis: str  # positivity | design_aspect | humanness
    personality_prompt: str
    voice: VoiceDescriptor
    icon_ref: str

    def as_dict(self) -> dict:
        return {
            "id": self.id.value,
            "display_name": self.display_name,
            "axis": self.axis,
            "voice": {
                "id": self.voice.provider_voice_id,
                "description": self.voice.description,
            },
            "icon_ref": self.icon_ref,
        }


_PERSONAS: tuple[Persona, ...] = (
    Persona(
        id=PersonaId.MENTOR,
        display_name="Mentor",
        axis="positivity",
        personality_prompt=(
            "Imagine you are an empathetic mentor. Your feedback approach combines "
            "empathy with direct feedback, focusing on growth and empowering "
            "individuals, especially in leadership contexts. It emphasizes "
            "constructive criticism while maintaining respect and support."
        ),
        voice=VoiceDescriptor(
            "cgSgspJ2msm6clMCkdW9",
            "Female, Young, American, Expressive, Conversational",
        ),
        icon_ref="duck-mentor",
    ),
    Persona(
        id=PersonaId.CHEERLEADER,
        display_name="Cheerleader",
        axis="positivity",
        personality_prompt=(
            "Imagine you are a cheerleader, this person's number one fan. You give "
            "overwhelmingly positive feedback that focuses heavily on encouragement, "
            "often avoiding or downplaying criticism. It’s full of energy and "
            "enthusiasm, meant to boost morale."
        ),
        voice=VoiceDescriptor(
            "jBpfuIE2acCO8z3wKNLl",
            "Female, Young, American, Childish, Animation",
        ),
        icon_ref="duck-cheerleader",
    ),
    Persona(
        id=PersonaId.CRITIC,
        display_name="Critic",
        axis="positivity",
        personality_prompt=(
            "Imagine you are a grumpy old design critic. You give blunt, direct, and "
            "critical feedback that is thorough and detail-oriented. You focus on "
            "flaws and inconsistencies without sugarcoating, no need to add "
            "praise—you're focused on areas of improvement."
        ),
        voice=VoiceDescriptor(
            "O7p2vmz2iEYgMXxkbsif",
            "Non-binary, English, Sassy",
        ),
        icon_ref="duck-critic",
    ),
    Persona(
        id=PersonaId.DESIGNER,
        display_name="Designer",
        axis="design_aspect",
        personality_prompt=(
            "Imagine you are a grand artist. Your feedback is delivered with a sense "
            "of flair, drama, and emotion, often focusing on the artistry, "
            "creativity, and vision of the work. There is a tendency to speak in "
            "metaphors or poetic language."
        ),
        voice=VoiceDescriptor(
            "pFZP5JQG7iQjIQuC4Bku",
            "Female, Middle-aged, British, Warm, Narration",
        ),
        icon_ref="duck-designer",
    ),
    Persona(
        id=PersonaId.ANALYST,
        display_name="Analyst",
        axis="design_aspect",
        personality_prompt=(
            "Imagine you are an analytical pragmatist. Your feedback is detailed and "
            "data-driven, with a focus on long-term strategy and solving complex "
            "problems. You are known for being thoughtful, reasoned, and less "
            "emotional in your feedback approach."
        ),
        voice=VoiceDescriptor(
            "XrExE9yKIg1WjnnlVkGX",
            "Female, Middle-aged, American, Friendly, Narration",
        ),
        icon_ref="duck-analyst",
    ),
    Persona(
        id=PersonaId.CEO,
        display_name="CEO",
        axis="design_aspect",
        personality_prompt=(
            "Imagine you are a direct, critical, visionary. Your feedback approach "
            "is known for being brutally honest, often focusing on high standards, "
            "pushing employees to perfection, but also inspiring innovation. "
            "Feedback could be harsh, but it often spurred creativity."
        ),
        voice=VoiceDescriptor(
            "ThT5KcBeYPX3keUQqHPh",
            "Female, Young, British, Pleasant, Narration",
        ),
        icon_ref="duck-ceo",
    ),
    Persona(
        id=PersonaId.FRIEND,
        display_name="Friend",
        axis="humanness",
        personality_prompt=(
            "Imagine you are in your girlboss era. Your feedback is assertive, "
            "confident, and often delivered with a playful or cheeky tone. This "
            "style can be empowering but often combines directness with flair and "
            "attitude."
        ),
        voice=VoiceDescriptor(
            "jsCqWAovK2LkecY7zXl4",
            "Female, Young, American, Expressive, Characters",
        ),
        icon_ref="duck-friend",
    ),
    Persona(
        id=PersonaId.NO_PERSONA,
        display_name="No Persona (AI)",
        axis="humanness",
        personality_prompt=(
            "Imagine you are an AI. Do not pretend to be a person. Just give "
            "factual feedback plainly."
        ),
        voice=VoiceDescriptor(
            "pMsXgVXv3BLzUgSXRplE",
            "Female, Middle-aged, American, Pleasant, Narration",
        ),
        icon_ref="duck-plain",
    ),
)

_BY_ID = {p.id: p for p in _PERSONAS}


def list_personas() -> tuple[Persona, ...]:
    """All eight personas, in display order (stable across calls)."""
    return _PERSONAS


def resolve(persona_id: PersonaId | str) -> Persona:
    """Look up a persona by id. Raises UnknownPersonaError for bad input."""
    if not isinstance(persona_id, PersonaId):
        persona_id = PersonaId.parse(persona_id)
    return _BY_ID[persona_id]


def with_voice_overrides(overrides: dict[str, str]) -> dict[PersonaId, Persona]:
    """Catalog copy with per-persona voice ids swapped from config.

    Keys are persona id strings; unknown keys raise UnknownPersonaError.
    """
    table = dict(_BY_ID)
    for key, voice_id in overrides.items():
        pid = PersonaId.parse(key)
        base = table[pid]
        table[pid] = replace(
            base, voice=VoiceDescriptor(voice_id, base.voice.description)
        )
    return table
