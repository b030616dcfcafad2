import unicodedata

import pytest
from hypothesis import given, strategies as st

from quac.personas import list_personas, resolve
from quac.prompts import (
    CONTEXT_PREFIX,
    EMOJI_PROMPT,
    GENERATION_PROMPT,
    MEMORY_JOIN,
    EmojiValidationError,
    EncodedImage,
    MemorySnapshot,
    assemble_emoji,
    assemble_feedback,
    validate_emoji_reply,
)

from . import golden


def img(ts=1.0, data="aW1n"):
    return EncodedImage(media_type="image/png", data_b64=data, captured_at=ts, mode="whole_screen")


def memory(*texts):
    return MemorySnapshot(
        feedback_texts=tuple(texts),
        screenshots=tuple(img(ts=float(i)) for i in range(len(texts))),
    )


class TestFeedbackAssembly:
    def test_critic_empty_memory_golden(self):
        payload = assemble_feedback(resolve("critic"), img(), MemorySnapshot())
        assert payload.text_parts[0] == golden.PERSONALITY["critic"]
        assert payload.text_parts[1] == golden.GENERATION
        assert len(payload.text_parts) == 2
        assert payload.image_parts == (img(),)
        assert payload.kind == "feedback"

    @pytest.mark.parametrize("persona", list_personas(), ids=lambda p: p.id.value)
    def test_all_personas_golden(self, persona):
        payload = assemble_feedback(persona, img(), MemorySnapshot())
        assert payload.text_parts[0] == golden.PERSONALITY[persona.id.value]
        assert payload.text_parts[1] == golden.GENERATION
        assert "Keep it under 50 words." in payload.text_parts[1]

    def test_empty_memory_no_context_part(self):
        payload = assemble_feedback(resolve("mentor"), img(), MemorySnapshot())
        assert not any("Try not to repeat yourself" in part for part in payload.text_parts)

    def test_memory_context_prefix_and_content(self):
        payload = assemble_feedback(
            resolve("mentor"), img(ts=9.0), memory("It's encouraging to see…")
        )
        assert payload.text_parts[-1].startswith(
            "Try not to repeat yourself, here is what you have said previously: "
            "It's encouraging to see…"
        )

    def test_memory_texts_joined_oldest_first(self):
        payload = assemble_feedback(resolve("ceo"), img(ts=9.0), memory("first", "second"))
        assert payload.text_parts[2] == CONTEXT_PREFIX + "first" + MEMORY_JOIN + "second"

    def test_image_order_memory_then_current(self):
        current = img(ts=99.0, data="Y3Vy")
        mem = memory("a", "b")
        payload = assemble_feedback(resolve("friend"), current, mem)
        assert payload.image_parts == mem.screenshots + (current,)
        times = [i.captured_at for i in payload.image_parts]
        assert times == sorted(times)

    def test_part_order_invariant(self):
        payload = assemble_feedback(resolve("analyst"), img(), memory("x"))
        assert payload.text_parts.index(GENERATION_PROMPT) == 1
        context = [i for i, p in enumerate(payload.text_parts) if p.startswith(CONTEXT_PREFIX)]
        assert context == [2]

    def test_pure_function(self):
        a = assemble_feedback(resolve("designer"), img(), memory("x"))
        b = assemble_feedback(resolve("designer"), img(), memory("x"))
        assert a == b
        assert a.digest() == b.digest()

    @given(
        depth=st.integers(min_value=0, max_value=5),
        history=st.lists(st.text(min_size=1, max_size=30), max_size=10),
    )
    def test_context_is_exactly_the_retained_window(self, depth, history):
        # the pipeline retains at most `depth` texts; assembly must pass them
        # through untouched and omit the context part when nothing is retained
        retained = tuple(history[-depth:]) if depth else ()
        snap = MemorySnapshot(
            feedback_texts=retained,
            screenshots=tuple(img(ts=float(i)) for i in range(len(retained))),
        )
        payload = assemble_feedback(resolve("mentor"), img(ts=999.0), snap)
        if retained:
            assert len(payload.text_parts) == 3
            assert payload.text_parts[2] == CONTEXT_PREFIX + MEMORY_JOIN.join(retained)
        else:
            assert len(payload.text_parts) == 2


class TestEmojiAssembly:
    def test_single_text_part_verbatim(self):
        payload = assemble_emoji(img())
        assert payload.text_parts == (golden.EMOJI_PROMPT,)
        assert payload.kind == "emoji"

    def test_single_image(self):
        assert len(assemble_emoji(img()).image_parts) == 1

    def test_prompt_independent_of_image(self):
        a = assemble_emoji(img(data="QQ=="))
        b = assemble_emoji(img(data="Qg=="))
        assert a.text_parts == b.text_parts
        assert a.image_parts != b.image_parts


class TestConstants:
    def test_generation_prompt_bounds(self):
        assert GENERATION_PROMPT.startswith("Provide feedback on the work in the photo(s)")
        assert GENERATION_PROMPT.endswith("one suggestion for improvement.")

    def test_context_prefix(self):
        assert CONTEXT_PREFIX == golden.CONTEXT_PREFIX

    def test_emoji_prompt(self):
        assert EMOJI_PROMPT.startswith("Please generate 5 UNICODE emojis")
        assert EMOJI_PROMPT == golden.EMOJI_PROMPT


EMOJIS = "🎉❤🥚🪑👏😀🚀🌈✨🔥👍💡"
TEXTY = "abzZ09,.!?-éñ字"


class TestEmojiValidation:
    def test_accepts_five_emoji_reply(self):
        assert validate_emoji_reply("🎉❤️🥚🪑👏") == ("🎉", "❤", "🥚", "🪑", "👏")

    def test_empty_rejected(self):
        with pytest.raises(EmojiValidationError):
            validate_emoji_reply("")

    def test_text_rejected(self):
        with pytest.raises(EmojiValidationError):
            validate_emoji_reply("Great! 🎉")

    def test_whitespace_between_emoji_ok(self):
        assert validate_emoji_reply(" 🎉  🚀\n👏 ") == ("🎉", "🚀", "👏")

    def test_duplicates_permitted(self):
        assert validate_emoji_reply("❤️❤️❤️") == ("❤", "❤", "❤")

    def test_whitespace_only_rejected(self):
        with pytest.raises(EmojiValidationError):
            validate_emoji_reply("   \n\t ")

    @given(st.lists(st.sampled_from(EMOJIS + " " + TEXTY), max_size=30))
    def test_fuzz_accept_iff_no_text_and_some_emoji(self, chars):
        raw = "".join(chars)
        # independent oracle: per-scalar Unicode category enumeration
        has_text = any(
            unicodedata.category(c)[0] in ("L", "N", "P") for c in raw
        )
        has_emoji = any(c in EMOJIS for c in raw)
        if not has_text and has_emoji:
            result = validate_emoji_reply(raw)
            assert len(result) >= 1
            assert all(c in EMOJIS for c in result)
        else:
            with pytest.raises(EmojiValidationError):
                validate_emoji_reply(raw)
