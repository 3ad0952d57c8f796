import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadpref.corpus import IMPLICIT, Implicit, Sentence, SurfaceQuad
from quadpref.template import (
    DEFAULT_MAPPING,
    ElementMapping,
    TemplateError,
    build_prompt,
    parse_marker_style,
    parse_output,
    render,
    render_marker_style,
)

TABLE_PREDICTION = (
    "(aspect term: service, opinion term: offensive, aspect category: "
    "service general, sentiment polarity: bad, rationale: service general "
    "is bad because service is offensive)"
)

WORDS = [
    "service", "food", "staff", "battery life", "screen", "support page",
    "never had one bad", "pretty good", "fresh", "offensive", "mediocre",
    "bland", "exotic fish", "100 dollar", "laptop general", "food quality",
    "keyboard", "so-so", "over the top",
]
CATEGORIES = [
    "service general", "food quality", "food prices", "ambience general",
    "laptop general", "battery operation_performance",
]
POLARITIES = ["positive", "negative", "neutral"]


def random_quad(rng):
    aspect = IMPLICIT if rng.random() < 0.2 else rng.choice(WORDS)
    opinion = IMPLICIT if rng.random() < 0.2 else rng.choice(WORDS)
    return SurfaceQuad(
        aspect=aspect,
        opinion=opinion,
        category=rng.choice(CATEGORIES),
        polarity=rng.choice(POLARITIES),
    )


def random_quad_list(rng, max_quads=4):
    return [random_quad(rng) for _ in range(rng.randint(1, max_quads))]


class TestRender:
    def test_table_golden_byte_exact(self):
        quad = SurfaceQuad("service", "offensive", "service general", "negative")
        assert render([quad]) == TABLE_PREDICTION

    def test_implicit_aspect_surfaces_as_it(self):
        quad = SurfaceQuad(IMPLICIT, "great value", "restaurant general", "positive")
        out = render([quad])
        assert "aspect term: it," in out
        assert "because it is great value" in out

    def test_two_groups_joined_with_semicolon_space(self, support_example):
        out = render(list(support_example.surface_quads()))
        assert out.count("; ") == 1
        assert out.count("(aspect term:") == 2

    def test_empty_list_rejected(self):
        with pytest.raises(TemplateError):
            render([])

    def test_lint_rejects_separator_collision(self):
        quad = SurfaceQuad(
            "thing, opinion term: fake", "x", "service general", "positive"
        )
        with pytest.raises(TemplateError, match="separator"):
            render([quad])

    def test_unknown_polarity_rejected(self):
        quad = SurfaceQuad("a", "b", "service general", "joyful")
        with pytest.raises(TemplateError, match="joyful"):
            render([quad])


class TestParse:
    def test_table_prediction_parses(self):
        report = parse_output(TABLE_PREDICTION)
        assert report.quads() == [
            SurfaceQuad("service", "offensive", "service general", "negative")
        ]
        assert report.flags() == [True]
        assert not report.malformed

    def test_contradicting_rationale_flagged_false(self):
        text = TABLE_PREDICTION.replace(
            "rationale: service general is bad", "rationale: service general is great"
        )
        report = parse_output(text)
        assert report.quads()[0].polarity == "negative"
        assert report.flags() == [False]

    def test_missing_field_reported_not_fatal(self):
        text = "(aspect term: a, opinion term: b, aspect category: c)"
        report = parse_output(text)
        assert report.quads() == []
        assert len(report.malformed) == 1
        assert "sentiment polarity" in report.malformed[0].reason

    def test_empty_input(self):
        report = parse_output("")
        assert report.quads() == [] and not report.malformed

    def test_garbage_without_groups(self):
        report = parse_output("no quads here at all")
        assert report.quads() == []
        assert len(report.malformed) == 1

    def test_commas_inside_values_survive(self):
        quad = SurfaceQuad(
            "fish, chips and more", "never had one bad", "food quality", "positive"
        )
        report = parse_output(render([quad]))
        assert report.quads() == [quad]
        assert report.flags() == [True]

    def test_unmappable_sentiment_word_diagnosed(self):
        text = TABLE_PREDICTION.replace("sentiment polarity: bad", "sentiment polarity: meh")
        report = parse_output(text)
        assert report.quads()[0].polarity == "meh"
        assert any("meh" in d for d in report.diagnostics)

    def test_roundtrip_random_quads(self):
        rng = random.Random(7)
        for _ in range(300):
            quads = random_quad_list(rng)
            report = parse_output(render(quads))
            assert report.quads() == quads
            assert all(report.flags())
            assert not report.malformed

    @given(st.text(max_size=300))
    @settings(max_examples=300, deadline=None)
    def test_never_raises_on_arbitrary_text(self, text):
        parse_output(text)


class TestMarkerStyle:
    def test_single_group_no_separator(self):
        quad = SurfaceQuad("food", "great", "food quality", "positive")
        out = render_marker_style([quad])
        assert out == "[A] food [O] great [C] food quality [S] positive"

    def test_two_groups_one_separator(self):
        quads = [
            SurfaceQuad("food", "great", "food quality", "positive"),
            SurfaceQuad("staff", "rude", "service general", "negative"),
        ]
        out = render_marker_style(quads)
        assert out.count(" [SSEP] ") == 1

    def test_roundtrip_random(self):
        rng = random.Random(13)
        for _ in range(100):
            quads = random_quad_list(rng)
            assert parse_marker_style(render_marker_style(quads)) == quads


class TestPrompt:
    def test_contains_sentence_verbatim(self, support_example):
        prompt = build_prompt(support_example.sentence)
        assert support_example.sentence.text in prompt
        assert prompt.startswith("Given the input text: their support page")
        assert "#Output Format" in prompt

    def test_byte_stable(self, support_example):
        assert build_prompt(support_example.sentence) == build_prompt(
            support_example.sentence
        )

    def test_empty_text_warns_but_renders(self, caplog):
        s = Sentence.from_text("e", "")
        with caplog.at_level("WARNING"):
            prompt = build_prompt(s)
        assert "Given the input text: ," in prompt
        assert "empty" in caplog.text


class TestGoldens:
    """Pinned byte-for-byte against the files under tests/goldens/."""

    def _golden(self, fixtures_dir, name):
        path = fixtures_dir.parent / "goldens" / name
        return path.read_text(encoding="utf-8")

    def test_prompt_golden(self, fixtures_dir, support_example):
        want = self._golden(fixtures_dir, "prompt_support_sentence.txt")
        assert build_prompt(support_example.sentence) == want

    def test_output_golden(self, fixtures_dir, support_example):
        want = self._golden(fixtures_dir, "output_support_sentence.txt")
        assert render(list(support_example.surface_quads())) == want

    def test_table_prediction_golden(self, fixtures_dir):
        want = self._golden(fixtures_dir, "output_table_prediction.txt")
        assert want == TABLE_PREDICTION
        report = parse_output(want)
        assert render(report.quads()) == want


class TestMapping:
    def test_inverse_composition_is_identity(self):
        m = DEFAULT_MAPPING
        for polarity in POLARITIES:
            assert m.polarity_for_word(m.word_for_polarity(polarity)) == polarity
        assert isinstance(IMPLICIT, Implicit)
        assert m.surface(IMPLICIT) == "it"

    def test_non_injective_mapping_rejected(self):
        with pytest.raises(TemplateError):
            ElementMapping(
                polarity_words=(("positive", "great"), ("negative", "great"))
            )

    def test_custom_neutral_word(self):
        m = ElementMapping(
            polarity_words=(
                ("positive", "great"),
                ("negative", "bad"),
                ("neutral", "fine"),
            )
        )
        quad = SurfaceQuad("a", "b", "service general", "neutral")
        out = render([quad], m)
        assert "sentiment polarity: fine" in out
        assert parse_output(out, m).quads() == [quad]

    def test_injectivity_on_rendered_lists(self):
        rng = random.Random(19)
        seen = {}
        for _ in range(500):
            quads = tuple(random_quad_list(rng))
            out = render(list(quads))
            if out in seen:
                assert seen[out] == quads
            seen[out] = quads
