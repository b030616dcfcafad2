"""Prompt assembly for feedback and emoji requests, plus emoji reply validation.

Assembly is pure: the same persona, image, and memory snapshot always yield a
byte-identical payload. Prompt text constants never vary with inputs.
"""

from __future__ import annotations

import hashlib
import unicodedata
from dataclasses import dataclass, field

from .personas import Persona

GENERATION_PROMPT = (
    "Provide feedback on the work in the photo(s) in a casual and constructive "
    "way. If there are multiple photos, they represent the progression of work "
    "over a period of time - focus on recent changes. Keep it under 50 words. "
    "Highlight strengths and offer one suggestion for improvement."
)

CONTEXT_PREFIX = "Try not to repeat yourself, here is what you have said previously: "

EMOJI_PROMPT = (
    "Please generate 5 UNICODE emojis based on the image, you can repeat and "
    "please show support to the designer. Besides adding a few supportive emojis "
    "like heart, congrats, etc. Make sure your output contains only emojis, no "
    "TEXT."
)

# Multiple prior feedbacks joined into the single context slot. Chosen to be
# greppable and absent from natural model output.
MEMORY_JOIN = " ||| "


@dataclass(frozen=True)
class EncodedImage:
    media_type: str
    data_b64: str
    captured_at: float
    mode: str


@dataclass(frozen=True)
class MemorySnapshot:
    """Prior feedback texts and their screenshots, oldest first."""

    feedback_texts: tuple[str, ...] = ()
    screenshots: tuple[EncodedImage, ...] = ()

    def __post_init__(self):
        if len(self.feedback_texts) != len(self.screenshots):
            raise ValueError("memory texts and screenshots must pair up")


@dataclass(frozen=True)
class PromptPayload:
    kind: str  # "feedback" | "emoji"
    text_parts: tuple[str, ...]
    image_parts: tuple[EncodedImage, ...]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.kind.encode())
        for part in self.text_parts:
            h.update(b"\x00T")
            h.update(part.encode())
        for img in self.image_parts:
            h.update(b"\x00I")
            h.update(img.media_type.encode())
            h.update(img.data_b64.encode())
        return h.hexdigest()[:16]


def assemble_feedback(
    persona: Persona, current: EncodedImage, memory: MemorySnapshot
) -> PromptPayload:
    """Build the three-part feedback prompt.

    Text order is fixed: personality prompt, generation prompt, then (only when
    memory is non-empty) one context part carrying all prior feedback texts.
    Images ride oldest-first with the current capture last.
    """
    text_parts = [persona.personality_prompt, GENERATION_PROMPT]
    if memory.feedback_texts:
        text_parts.append(CONTEXT_PREFIX + MEMORY_JOIN.join(memory.feedback_texts))
    image_parts = tuple(memory.screenshots) + (current,)
    return PromptPayload(
        kind="feedback", text_parts=tuple(text_parts), image_parts=image_parts
    )


def assemble_emoji(current: EncodedImage) -> PromptPayload:
    """Build the single-part emoji prompt for the current capture."""
    return PromptPayload(
        kind="emoji", text_parts=(EMOJI_PROMPT,), image_parts=(current,)
    )


class EmojiValidationError(ValueError):
    def __init__(self, raw: str, reason: str):
        super().__init__(f"emoji reply rejected ({reason}): {raw!r}")
        self.raw = raw
        self.reason = reason


# Presentation machinery that glues emoji sequences together; stripped before
# classification and never counted as text.
_JOINERS = {
    "‍",  # zero width joiner
    "︎",  # text variation selector
    "️",  # emoji variation selector
    "⃣",  # combining enclosing keycap
}
_SKIN_TONES = set(map(chr, range(0x1F3FB, 0x1F400)))

# Symbol blocks whose members read as emoji even when their general category
# is not So (e.g. dingbat arrows).
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),  # mahjong .. symbols & pictographs extended
    (0x2600, 0x27BF),  # misc symbols, dingbats
    (0x2190, 0x21FF),  # arrows (emoji with VS16)
    (0x2B00, 0x2BFF),  # misc symbols and arrows
    (0x1F1E6, 0x1F1FF),  # regional indicators
    (0x2049, 0x2049),
    (0x203C, 0x203C),
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3299),
    (0x00A9, 0x00A9),
    (0x00AE, 0x00AE),
    (0x2122, 0x2122),
    (0x2139, 0x2139),
    (0x24C2, 0x24C2),
    (0x25AA, 0x25FE),
    (0x2934, 0x2935),
)


def _is_emoji_scalar(ch: str) -> bool:
    cp = ord(ch)
    if any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES):
        return True
    if ch in _SKIN_TONES:
        return True
    return unicodedata.category(ch) == "So"


def validate_emoji_reply(raw: str) -> tuple[str, ...]:
    """Extract the emoji scalars from a provider reply.

    Accepts iff at least one emoji is present and nothing but emoji,
    whitespace, and emoji presentation glue remains. Duplicates are fine.
    Raises EmojiValidationError otherwise.
    """
    emojis: list[str] = []
    for ch in raw:
        if ch.isspace() or ch in _JOINERS:
            continue
        if _is_emoji_scalar(ch):
            emojis.append(ch)
        else:
            raise EmojiValidationError(raw, f"non-emoji character {ch!r}")
    if not emojis:
        raise EmojiValidationError(raw, "no emoji found")
    return tuple(emojis)
