"""Data model and ingestion for aspect sentiment quad datasets.

A dataset is a sequence of annotated examples, each pairing one sentence with
one or more (aspect, opinion, category, polarity) quads. Aspect and opinion
are token spans of the sentence or the IMPLICIT sentinel; category and
polarity are labels from closed vocabularies.
"""

from __future__ import annotations

import ast
import json
import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence, Union


class Implicit:
    """Sentinel type for implicit aspect/opinion elements.

    A dedicated singleton rather than a magic string, so a sentence that
    happens to contain the word "null" can never collide with it.
    """

    _instance = None

    def __new__(cls) -> "Implicit":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "IMPLICIT"

    def __reduce__(self):
        return (Implicit, ())


IMPLICIT = Implicit()

TokenSpan = tuple[int, int]
SpanOrImplicit = Union[TokenSpan, Implicit]


class Token(NamedTuple):
    text: str
    start: int
    end: int


class CorpusError(ValueError):
    """Structural problem in corpus data."""


class LoadError(CorpusError):
    """A dataset record could not be decoded."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class RecordIssue:
    line_no: int
    reason: str


_PUNCT = set(string.punctuation)


def tokenize(text: str) -> tuple[Token, ...]:
    """Whitespace tokenization with edge punctuation detached as own tokens.

    Offsets always index into the original string, so every token satisfies
    text[start:end] == token.text.
    """
    tokens: list[Token] = []
    for m in re.finditer(r"\S+", text):
        cs, ce = m.span()
        while ce - cs > 1 and text[cs] in _PUNCT:
            tokens.append(Token(text[cs], cs, cs + 1))
            cs += 1
        tail: list[Token] = []
        while ce - cs > 1 and text[ce - 1] in _PUNCT:
            tail.append(Token(text[ce - 1], ce - 1, ce))
            ce -= 1
        tokens.append(Token(text[cs:ce], cs, ce))
        tokens.extend(reversed(tail))
    return tuple(tokens)


@dataclass(frozen=True)
class Sentence:
    """One input sentence with its token layer."""

    id: str
    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if any(not isinstance(tok, Token) for tok in self.tokens):
            object.__setattr__(
                self, "tokens", tuple(Token(t, s, e) for t, s, e in self.tokens)
            )
        prev_end = -1
        for tok in self.tokens:
            if tok.start < 0 or tok.end > len(self.text) or tok.start >= tok.end:
                raise CorpusError(
                    f"sentence {self.id!r}: token offsets {tok.start}:{tok.end} "
                    f"out of range for text of length {len(self.text)}"
                )
            if tok.start < prev_end:
                raise CorpusError(
                    f"sentence {self.id!r}: token offsets overlap or decrease at {tok}"
                )
            if self.text[tok.start : tok.end] != tok.text:
                raise CorpusError(
                    f"sentence {self.id!r}: token {tok.text!r} does not match "
                    f"text slice {self.text[tok.start:tok.end]!r}"
                )
            prev_end = tok.end

    @classmethod
    def from_text(cls, id: str, text: str) -> "Sentence":
        return cls(id=id, text=text, tokens=tokenize(text))

    def token_texts(self) -> tuple[str, ...]:
        return tuple(tok.text for tok in self.tokens)

    def span_text(self, span: TokenSpan) -> str:
        s, e = span
        if not (0 <= s < e <= len(self.tokens)):
            raise CorpusError(
                f"sentence {self.id!r}: span {span} out of range "
                f"(sentence has {len(self.tokens)} tokens)"
            )
        return self.text[self.tokens[s].start : self.tokens[e - 1].end]


@dataclass(frozen=True)
class SurfaceQuad:
    """A quad in surface form: element strings rather than token spans.

    This is what templates render and parsers recover; predicted quads from
    free model output exist only in this form.
    """

    aspect: Union[str, Implicit]
    opinion: Union[str, Implicit]
    category: str
    polarity: str


@dataclass(frozen=True)
class Quad:
    """A gold quad anchored to token spans of its owning sentence."""

    aspect: SpanOrImplicit
    opinion: SpanOrImplicit
    category: str
    polarity: str

    def surface(self, sentence: Sentence) -> SurfaceQuad:
        return SurfaceQuad(
            aspect=IMPLICIT
            if isinstance(self.aspect, Implicit)
            else sentence.span_text(self.aspect),
            opinion=IMPLICIT
            if isinstance(self.opinion, Implicit)
            else sentence.span_text(self.opinion),
            category=self.category,
            polarity=self.polarity,
        )


@dataclass(frozen=True)
class CategoryList:
    categories: tuple[str, ...]

    def __post_init__(self):
        if not self.categories:
            raise CorpusError("category list must be non-empty")
        if len(set(self.categories)) != len(self.categories):
            raise CorpusError("category list contains duplicates")

    def __contains__(self, item: str) -> bool:
        return item in self.categories

    def __iter__(self):
        return iter(self.categories)

    def __len__(self) -> int:
        return len(self.categories)


@dataclass(frozen=True)
class PolarityList:
    polarities: tuple[str, ...] = ("positive", "negative", "neutral")

    def __post_init__(self):
        if len(set(self.polarities)) != len(self.polarities):
            raise CorpusError("polarity list contains duplicates")
        missing = {"positive", "negative"} - set(self.polarities)
        if missing:
            raise CorpusError(f"polarity list missing {sorted(missing)}")

    def __contains__(self, item: str) -> bool:
        return item in self.polarities

    def __iter__(self):
        return iter(self.polarities)

    def __len__(self) -> int:
        return len(self.polarities)


DEFAULT_POLARITIES = PolarityList()


@dataclass(frozen=True)
class AnnotatedExample:
    sentence: Sentence
    quads: tuple[Quad, ...]

    def __post_init__(self):
        if not self.quads:
            raise CorpusError(
                f"sentence {self.sentence.id!r}: example has no quads"
            )

    def surface_quads(self) -> tuple[SurfaceQuad, ...]:
        return tuple(q.surface(self.sentence) for q in self.quads)


@dataclass(frozen=True)
class Violation:
    quad_index: int
    kind: str
    message: str


def validate_example(
    example: AnnotatedExample,
    categories: CategoryList | None = None,
    polarities: PolarityList = DEFAULT_POLARITIES,
) -> list[Violation]:
    """Check every quad invariant; violations are data, not exceptions."""
    report: list[Violation] = []
    n_tokens = len(example.sentence.tokens)
    for i, quad in enumerate(example.quads):
        for role, value in (("aspect", quad.aspect), ("opinion", quad.opinion)):
            if isinstance(value, Implicit):
                continue
            s, e = value
            if not (0 <= s < e <= n_tokens):
                report.append(
                    Violation(
                        i,
                        "span-out-of-range",
                        f"{role} span {value} invalid for {n_tokens} tokens",
                    )
                )
        if categories is not None and quad.category not in categories:
            report.append(
                Violation(
                    i, "unknown-category", f"category {quad.category!r} not in vocabulary"
                )
            )
        if quad.polarity not in polarities:
            report.append(
                Violation(
                    i, "unknown-polarity", f"polarity {quad.polarity!r} not in vocabulary"
                )
            )
    return report


def resolve_span(sentence: Sentence, phrase: str) -> TokenSpan | None:
    """Locate `phrase` as a contiguous token run; first match wins.

    Falls back to casefolded comparison when no exact match exists.
    """
    target = tuple(t.text for t in tokenize(phrase))
    if not target:
        return None
    texts = sentence.token_texts()
    for fold in (False, True):
        hay = tuple(t.casefold() for t in texts) if fold else texts
        needle = tuple(t.casefold() for t in target) if fold else target
        for i in range(len(hay) - len(needle) + 1):
            if hay[i : i + len(needle)] == needle:
                return (i, i + len(needle))
    return None


def _decode_element(
    value, sentence: Sentence, role: str
) -> SpanOrImplicit:
    if value is None:
        return IMPLICIT
    if isinstance(value, str):
        span = resolve_span(sentence, value)
        if span is None:
            raise CorpusError(f"{role} {value!r} not found in sentence")
        return span
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, int) for v in value)
    ):
        s, e = value
        if not (0 <= s < e <= len(sentence.tokens)):
            raise CorpusError(
                f"{role} span [{s}, {e}] out of range for "
                f"{len(sentence.tokens)} tokens"
            )
        return (s, e)
    raise CorpusError(f"{role} must be null, a string, or a [start, end] pair")


def _example_from_json(
    line_no: int,
    obj,
    categories: CategoryList | None,
    polarities: PolarityList,
) -> AnnotatedExample:
    if not isinstance(obj, dict):
        raise CorpusError("record is not a JSON object")
    text = obj.get("text")
    if not isinstance(text, str):
        raise CorpusError("missing or non-string 'text' field")
    sid = obj.get("id", f"line{line_no}")
    raw_tokens = obj.get("tokens")
    if raw_tokens is None:
        sentence = Sentence.from_text(str(sid), text)
    else:
        try:
            tokens = tuple(Token(str(t), int(s), int(e)) for t, s, e in raw_tokens)
        except (TypeError, ValueError):
            raise CorpusError("'tokens' entries must be [text, start, end] triples")
        sentence = Sentence(str(sid), text, tokens)
    raw_quads = obj.get("quads")
    if not isinstance(raw_quads, list) or not raw_quads:
        raise CorpusError("missing or empty 'quads' field")
    quads = []
    for q in raw_quads:
        if not isinstance(q, dict):
            raise CorpusError("quad entries must be objects")
        category = q.get("category")
        polarity = q.get("polarity")
        if not isinstance(category, str) or not isinstance(polarity, str):
            raise CorpusError("quad needs string 'category' and 'polarity'")
        if categories is not None and category not in categories:
            raise CorpusError(f"unknown category {category!r}")
        if polarity not in polarities:
            raise CorpusError(f"unknown polarity {polarity!r}")
        quads.append(
            Quad(
                aspect=_decode_element(q.get("aspect"), sentence, "aspect"),
                opinion=_decode_element(q.get("opinion"), sentence, "opinion"),
                category=category,
                polarity=polarity,
            )
        )
    return AnnotatedExample(sentence=sentence, quads=tuple(quads))


def _example_from_legacy(
    line_no: int,
    line: str,
    categories: CategoryList | None,
    polarities: PolarityList,
) -> AnnotatedExample:
    if "####" not in line:
        raise CorpusError("missing '####' separator")
    text, _, quad_part = line.partition("####")
    text = text.strip()
    sentence = Sentence.from_text(f"line{line_no}", text)
    try:
        parsed = ast.literal_eval(quad_part.strip())
    except (ValueError, SyntaxError) as exc:
        raise CorpusError(f"quad list is not a literal list: {exc}")
    if not isinstance(parsed, list) or not parsed:
        raise CorpusError("quad list empty or not a list")
    quads = []
    for entry in parsed:
        if not isinstance(entry, (list, tuple)) or len(entry) != 4:
            raise CorpusError(
                "each quad must be a 4-item list (aspect, category, polarity, opinion)"
            )
        aspect_s, category, polarity, opinion_s = (str(v) for v in entry)
        if categories is not None and category not in categories:
            raise CorpusError(f"unknown category {category!r}")
        if polarity not in polarities:
            raise CorpusError(f"unknown polarity {polarity!r}")
        quads.append(
            Quad(
                aspect=_decode_element(
                    None if aspect_s == "NULL" else aspect_s, sentence, "aspect"
                ),
                opinion=_decode_element(
                    None if opinion_s == "NULL" else opinion_s, sentence, "opinion"
                ),
                category=category,
                polarity=polarity,
            )
        )
    return AnnotatedExample(sentence=sentence, quads=tuple(quads))


_FORMATS = ("jsonl", "legacy", "legacy-delimited")


def scan_dataset(
    path: str | Path,
    format: str = "jsonl",
    categories: CategoryList | None = None,
    polarities: PolarityList = DEFAULT_POLARITIES,
) -> tuple[list[AnnotatedExample], list[RecordIssue]]:
    """Read every record; collect bad records as issues instead of raising.

    len(examples) + len(issues) always equals the number of non-blank lines,
    so no record is ever dropped silently.
    """
    if format not in _FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {_FORMATS}")
    examples: list[AnnotatedExample] = []
    issues: list[RecordIssue] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                if format == "jsonl":
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise CorpusError(f"invalid JSON: {exc}")
                    ex = _example_from_json(line_no, obj, categories, polarities)
                else:
                    ex = _example_from_legacy(line_no, line, categories, polarities)
                examples.append(ex)
            except CorpusError as exc:
                issues.append(RecordIssue(line_no, str(exc)))
    return examples, issues


def load_dataset(
    path: str | Path,
    format: str = "jsonl",
    categories: CategoryList | None = None,
    polarities: PolarityList = DEFAULT_POLARITIES,
) -> list[AnnotatedExample]:
    """Strict loader: raises LoadError on the first malformed record."""
    examples, issues = scan_dataset(path, format, categories, polarities)
    if issues:
        first = issues[0]
        raise LoadError(first.line_no, first.reason)
    return examples


def stats(examples: Sequence[AnnotatedExample]) -> tuple[int, int]:
    """(sentence count, quad count)."""
    return len(examples), sum(len(ex.quads) for ex in examples)


def _encode_element(value: SpanOrImplicit):
    return None if isinstance(value, Implicit) else [value[0], value[1]]


def example_to_dict(example: AnnotatedExample) -> dict:
    return {
        "id": example.sentence.id,
        "text": example.sentence.text,
        "tokens": [[t.text, t.start, t.end] for t in example.sentence.tokens],
        "quads": [
            {
                "aspect": _encode_element(q.aspect),
                "opinion": _encode_element(q.opinion),
                "category": q.category,
                "polarity": q.polarity,
            }
            for q in example.quads
        ],
    }


def example_to_jsonl(example: AnnotatedExample) -> str:
    return json.dumps(example_to_dict(example), ensure_ascii=False)


def write_dataset(path: str | Path, examples: Iterable[AnnotatedExample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(example_to_jsonl(ex) + "\n")


def vocab_from_examples(
    examples: Sequence[AnnotatedExample],
) -> tuple[CategoryList, PolarityList]:
    """Vocabularies in first-occurrence order, as observed in the corpus."""
    cats: list[str] = []
    pols: list[str] = []
    for ex in examples:
        for q in ex.quads:
            if q.category not in cats:
                cats.append(q.category)
            if q.polarity not in pols:
                pols.append(q.polarity)
    for required in ("positive", "negative"):
        if required not in pols:
            pols.append(required)
    return CategoryList(tuple(cats)), PolarityList(tuple(pols))
