"""Rendering and parsing of the reasoning-style output format.

Each quad is rendered as a parenthesized group of prefixed fields plus a
fixed-pattern rationale binding all four elements:

    (aspect term: A, opinion term: O, aspect category: C,
     sentiment polarity: S, rationale: C is S because A is O)

Groups are joined with "; ". Polarity labels and implicit elements are
surfaced through a wordable mapping (positive -> great, negative -> bad,
neutral -> ok, implicit -> it) and inverted on parse.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .corpus import (
    IMPLICIT,
    CategoryList,
    Implicit,
    PolarityList,
    Sentence,
    SurfaceQuad,
)

logger = logging.getLogger(__name__)

FIELD_PREFIXES = (
    "aspect term:",
    "opinion term:",
    "aspect category:",
    "sentiment polarity:",
    "rationale:",
)

GROUP_SEPARATOR = "; "

PROMPT_TEMPLATE = (
    "Given the input text: {text}, infer aspect terms, opinion terms, "
    "aspect categories, and sentiment polarity following the format. "
    "Please join with semicolon if multiple aspects or opinions are detected.\n"
    "#Output Format\n"
    "(aspect term: [aspect term], opinion term: [opinion term], "
    "aspect category: [aspect category], sentiment polarity: [sentiment polarity], "
    "rationale: [aspect category] is [sentiment polarity] "
    "because [aspect term] is [opinion term])"
)


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class ElementMapping:
    """Bidirectional map between labels and their surfaced words."""

    polarity_words: tuple[tuple[str, str], ...] = (
        ("positive", "great"),
        ("negative", "bad"),
        ("neutral", "ok"),
    )
    implicit_word: str = "it"

    def __post_init__(self):
        words = [w for _, w in self.polarity_words]
        if len(set(words)) != len(words):
            raise TemplateError("polarity word mapping must be injective")
        if self.implicit_word in words:
            raise TemplateError("implicit word collides with a polarity word")

    def word_for_polarity(self, polarity: str) -> str:
        for label, word in self.polarity_words:
            if label == polarity:
                return word
        raise TemplateError(f"no surface word for polarity {polarity!r}")

    def polarity_for_word(self, word: str) -> str | None:
        for label, mapped in self.polarity_words:
            if mapped == word:
                return label
        return None

    def surface(self, value: Union[str, Implicit]) -> str:
        return self.implicit_word if isinstance(value, Implicit) else value


DEFAULT_MAPPING = ElementMapping()

# A value containing ", <known prefix>" would make rendering ambiguous; the
# parser splits on prefixes, so such values are rejected up front.
_LINT_PATTERN = re.compile(
    r",\s*(" + "|".join(re.escape(p) for p in FIELD_PREFIXES) + ")"
)


def _lint_value(role: str, value: str) -> None:
    if _LINT_PATTERN.search(value):
        raise TemplateError(
            f"{role} value {value!r} contains a field separator sequence and "
            "cannot be rendered unambiguously"
        )


def render(
    quads: Sequence[SurfaceQuad], mapping: ElementMapping = DEFAULT_MAPPING
) -> str:
    """Render quads into the reasoning-style output string."""
    if not quads:
        raise TemplateError("cannot render an empty quad list")
    groups = []
    for quad in quads:
        ma = mapping.surface(quad.aspect)
        mo = mapping.surface(quad.opinion)
        mc = quad.category
        ms = mapping.word_for_polarity(quad.polarity)
        for role, value in (
            ("aspect", ma),
            ("opinion", mo),
            ("category", mc),
            ("polarity", ms),
        ):
            _lint_value(role, value)
        groups.append(
            f"(aspect term: {ma}, opinion term: {mo}, aspect category: {mc}, "
            f"sentiment polarity: {ms}, "
            f"rationale: {mc} is {ms} because {ma} is {mo})"
        )
    return GROUP_SEPARATOR.join(groups)


@dataclass(frozen=True)
class ParsedGroup:
    quad: SurfaceQuad
    coherent: bool
    raw: str


@dataclass(frozen=True)
class MalformedGroup:
    raw: str
    reason: str


@dataclass(frozen=True)
class ParseReport:
    groups: tuple[ParsedGroup, ...]
    malformed: tuple[MalformedGroup, ...]
    diagnostics: tuple[str, ...] = ()

    def quads(self) -> list[SurfaceQuad]:
        return [g.quad for g in self.groups]

    def flags(self) -> list[bool]:
        return [g.coherent for g in self.groups]


def _parse_group(raw: str) -> tuple[dict[str, str], str | None]:
    """Extract the five fields from one group; returns (fields, error)."""
    inner = raw.strip()
    if inner.startswith("("):
        inner = inner[1:]
        if inner.rstrip().endswith(")"):
            inner = inner.rstrip()[:-1]
    fields: dict[str, str] = {}
    cursor = 0
    positions = []
    for prefix in FIELD_PREFIXES:
        at = inner.find(prefix, cursor)
        if at < 0:
            return fields, f"missing field {prefix[:-1]!r}"
        positions.append((prefix, at))
        cursor = at + len(prefix)
    for i, (prefix, at) in enumerate(positions):
        start = at + len(prefix)
        end = positions[i + 1][1] if i + 1 < len(positions) else len(inner)
        value = inner[start:end].strip()
        if i + 1 < len(positions) and value.endswith(","):
            value = value[:-1].rstrip()
        fields[prefix] = value
    return fields, None


def parse_output(
    text: str,
    mapping: ElementMapping = DEFAULT_MAPPING,
    categories: CategoryList | None = None,
    polarities: PolarityList | None = None,
) -> ParseReport:
    """Parse arbitrary model output into quads plus coherence flags.

    Never raises on malformed content: groups that cannot be parsed are
    reported in the result, and vocabulary problems become diagnostics.
    The coherence flag is true iff a group's rationale restates its own
    fields verbatim.
    """
    groups: list[ParsedGroup] = []
    malformed: list[MalformedGroup] = []
    diagnostics: list[str] = []
    if not isinstance(text, str) or not text.strip():
        return ParseReport((), (), ())

    anchor = FIELD_PREFIXES[0]
    starts = [m.start() for m in re.finditer(re.escape(anchor), text)]
    if not starts:
        return ParseReport(
            (), (MalformedGroup(text.strip(), "no quad groups found"),), ()
        )
    # Pull each group's opening parenthesis (if present) into its slice.
    adjusted = []
    for s in starts:
        lead = s
        while lead > 0 and text[lead - 1] in " \t":
            lead -= 1
        if lead > 0 and text[lead - 1] == "(":
            lead -= 1
        adjusted.append(lead)
    for i, s in enumerate(adjusted):
        e = adjusted[i + 1] if i + 1 < len(adjusted) else len(text)
        raw = text[s:e].strip().rstrip(";").strip()
        fields, err = _parse_group(raw)
        if err is not None:
            malformed.append(MalformedGroup(raw, err))
            continue
        ma = fields[FIELD_PREFIXES[0]]
        mo = fields[FIELD_PREFIXES[1]]
        mc = fields[FIELD_PREFIXES[2]]
        ms = fields[FIELD_PREFIXES[3]]
        rationale = fields[FIELD_PREFIXES[4]]
        polarity = mapping.polarity_for_word(ms)
        if polarity is None:
            diagnostics.append(f"unmappable sentiment word {ms!r}")
            polarity = ms
        elif polarities is not None and polarity not in polarities:
            diagnostics.append(f"polarity {polarity!r} not in vocabulary")
        if categories is not None and mc not in categories:
            diagnostics.append(f"category {mc!r} not in vocabulary")
        quad = SurfaceQuad(
            aspect=IMPLICIT if ma == mapping.implicit_word else ma,
            opinion=IMPLICIT if mo == mapping.implicit_word else mo,
            category=mc,
            polarity=polarity,
        )
        expected_rationale = f"{mc} is {ms} because {ma} is {mo}"
        groups.append(
            ParsedGroup(quad=quad, coherent=rationale == expected_rationale, raw=raw)
        )
    return ParseReport(tuple(groups), tuple(malformed), tuple(diagnostics))


_MARKER_SEPARATOR = " [SSEP] "
_MARKER_GROUP = re.compile(
    r"\[A\]\s*(.*?)\s*\[O\]\s*(.*?)\s*\[C\]\s*(.*?)\s*\[S\]\s*(.*)\s*$", re.DOTALL
)


def render_marker_style(quads: Sequence[SurfaceQuad]) -> str:
    """Baseline marker format: "[A] a [O] o [C] c [S] s" joined by [SSEP].

    Implicit elements surface as NULL; polarity stays a raw label.
    """
    if not quads:
        raise TemplateError("cannot render an empty quad list")
    groups = []
    for quad in quads:
        a = "NULL" if isinstance(quad.aspect, Implicit) else quad.aspect
        o = "NULL" if isinstance(quad.opinion, Implicit) else quad.opinion
        groups.append(f"[A] {a} [O] {o} [C] {quad.category} [S] {quad.polarity}")
    return _MARKER_SEPARATOR.join(groups)


def parse_marker_style(text: str) -> list[SurfaceQuad]:
    quads = []
    for part in re.split(r"\s*\[SSEP\]\s*", text.strip()):
        if not part:
            continue
        m = _MARKER_GROUP.match(part)
        if m is None:
            continue
        a, o, c, s = (g.strip() for g in m.groups())
        quads.append(
            SurfaceQuad(
                aspect=IMPLICIT if a == "NULL" else a,
                opinion=IMPLICIT if o == "NULL" else o,
                category=c,
                polarity=s,
            )
        )
    return quads


def build_prompt(sentence: Sentence) -> str:
    """The generation prompt with the sentence text substituted in."""
    if not sentence.text:
        logger.warning("building prompt for empty sentence %r", sentence.id)
    return PROMPT_TEMPLATE.format(text=sentence.text)
