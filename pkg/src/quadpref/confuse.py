"""Element-wise confusable candidate generation and listwise composition.

For each gold quad, six candidate families are built:

* aspects / opinions: spans with the gold element's POS pattern, ranked by
  syntactic tree distance (semantic ranking when the gold element is
  implicit, since distance to an unexpressed span is undefined);
* categories: nearest vocabulary categories by embedding cosine;
* polarities: every other polarity label;
* opinion+polarity pairs: each opinion candidate paired with its most
  similar non-gold polarity word;
* category+polarity pairs: each category candidate paired with a uniformly
  sampled non-gold polarity.

Samples then draw one negative per family (cycling for larger N), each a
full re-rendered output with exactly one quad minimally altered and its
rationale kept in sync.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

from .corpus import (
    AnnotatedExample,
    CategoryList,
    Implicit,
    PolarityList,
    Sentence,
    SurfaceQuad,
)
from .semantics import EmbeddingTable, PhraseLookupError, cosine, top_k_similar
from .syntax import ConstituentTree, SpanCandidate, coarse_tag, nearest_spans
from .template import DEFAULT_MAPPING, ElementMapping, build_prompt, render

logger = logging.getLogger(__name__)

ELEMENTS = ("aspect", "opinion", "category", "polarity")

FAMILY_ORDER = (
    "aspect",
    "opinion",
    "category",
    "polarity",
    "opinion_polarity",
    "category_polarity",
)


class ComposeError(RuntimeError):
    """A listwise sample could not be assembled."""

    def __init__(self, family: str, quad_index: int, detail: str):
        super().__init__(
            f"candidate family {family!r} exhausted for quad {quad_index}: {detail}"
        )
        self.family = family
        self.quad_index = quad_index


@dataclass(frozen=True)
class GenerationConfig:
    k_aspect: int = 3
    k_opinion: int = 3
    k_category: int = 3
    k_polarity_pair: int = 1
    negatives_per_sample: int = 6
    seed: int = 0

    def __post_init__(self):
        for name in ("k_aspect", "k_opinion", "k_category", "k_polarity_pair"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.negatives_per_sample < 4:
            raise ValueError(
                "negatives_per_sample must be >= 4 so every element can be covered"
            )


@dataclass(frozen=True)
class Perturbation:
    altered: tuple[str, ...]
    replacements: dict[str, str]
    quad_index: int

    def __post_init__(self):
        if not self.altered:
            raise ValueError("a perturbation must alter at least one element")
        unknown = set(self.altered) - set(ELEMENTS)
        if unknown:
            raise ValueError(f"unknown elements {sorted(unknown)}")


@dataclass
class CandidateSet:
    quad_index: int
    aspects: list[SpanCandidate] = field(default_factory=list)
    opinions: list[SpanCandidate] = field(default_factory=list)
    categories: list[str] = field(default_factory=list)
    polarities: list[str] = field(default_factory=list)
    opinion_polarity: list[tuple[SpanCandidate, str]] = field(default_factory=list)
    category_polarity: list[tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class ListwiseSample:
    example_id: str
    prompt: str
    gold: str
    negatives: tuple[str, ...]
    target: tuple[int, ...]
    provenance: tuple[Perturbation, ...]

    def __post_init__(self):
        if self.target != (1,) + (0,) * len(self.negatives):
            raise ValueError("target must be one-hot on the gold candidate")

    def to_dict(self) -> dict:
        return {
            "id": self.example_id,
            "prompt": self.prompt,
            "chosen": self.gold,
            "rejected": list(self.negatives),
            "provenance": [
                {
                    "altered": list(p.altered),
                    "replacements": dict(p.replacements),
                    "quad_index": p.quad_index,
                }
                for p in self.provenance
            ],
        }


def _pos_pattern(tree: ConstituentTree, span: tuple[int, int]) -> tuple[str, ...]:
    tags = tree.pos_tags()
    return tags[span[0] : span[1]]


def _constituent_spans(
    tree: ConstituentTree, labels: set[str], leaf_classes: set[str]
) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for node in tree.nodes():
        span = None
        if not node.is_leaf and node.label in labels:
            span = node.span
        elif node.is_leaf and coarse_tag(node.label) in leaf_classes:
            span = node.span
        if span is not None and span not in seen:
            seen.add(span)
            spans.append(span)
    return sorted(spans)


def _semantic_span_candidates(
    sentence: Sentence,
    tree: ConstituentTree,
    emb: EmbeddingTable,
    spans: Sequence[tuple[int, int]],
    reference: str | None,
    k: int,
) -> list[SpanCandidate]:
    """Ranking for implicit gold elements: cosine to a reference phrase.

    Falls back to surface order when the reference phrase (or every span)
    lacks an embedding, so generation degrades instead of aborting.
    """
    ranked: list[tuple[float, tuple[int, int]]] = []
    have_ref = reference is not None and reference in emb
    if reference is not None and not have_ref:
        logger.warning(
            "no embedding for reference phrase %r; using surface order", reference
        )
    for span in spans:
        text = sentence.span_text(span)
        if have_ref and text in emb:
            score = -cosine(emb, reference, text)
        else:
            if have_ref:
                logger.warning("no embedding for span %r; ranked last", text)
            score = 2.0
        ranked.append((score, span))
    ranked.sort(key=lambda item: (item[0], item[1]))
    out = []
    for _, span in ranked[:k]:
        out.append(
            SpanCandidate(
                span=span,
                pos_tags=_pos_pattern(tree, span),
                node=tree.covering_node(span),
            )
        )
    return out


def single_element_candidates(
    example: AnnotatedExample,
    quad_index: int,
    tree: ConstituentTree,
    emb: EmbeddingTable,
    categories: CategoryList,
    polarities: PolarityList,
    cfg: GenerationConfig,
) -> CandidateSet:
    """Single-element families for one quad: spans, categories, polarities."""
    sentence = example.sentence
    quad = example.quads[quad_index]
    if len(tree) != len(sentence.tokens):
        raise ValueError(
            f"tree has {len(tree)} leaves but sentence {sentence.id!r} has "
            f"{len(sentence.tokens)} tokens"
        )
    cand = CandidateSet(quad_index=quad_index)

    gold_category = quad.category
    gold_polarity = quad.polarity
    aspect_text = (
        None if isinstance(quad.aspect, Implicit) else sentence.span_text(quad.aspect)
    )
    opinion_text = (
        None if isinstance(quad.opinion, Implicit) else sentence.span_text(quad.opinion)
    )

    if isinstance(quad.aspect, Implicit):
        spans = _constituent_spans(tree, {"NP"}, {"NOUN"})
        cand.aspects = _semantic_span_candidates(
            sentence, tree, emb, spans, opinion_text or gold_category, cfg.k_aspect
        )
    else:
        cand.aspects = nearest_spans(
            tree, quad.aspect, _pos_pattern(tree, quad.aspect), cfg.k_aspect
        )

    if isinstance(quad.opinion, Implicit):
        spans = _constituent_spans(tree, {"ADJP", "ADVP"}, {"ADJ", "ADV"})
        cand.opinions = _semantic_span_candidates(
            sentence, tree, emb, spans, aspect_text or gold_category, cfg.k_opinion
        )
    else:
        cand.opinions = nearest_spans(
            tree, quad.opinion, _pos_pattern(tree, quad.opinion), cfg.k_opinion
        )

    try:
        cand.categories = [
            phrase
            for phrase, _ in top_k_similar(
                emb,
                gold_category,
                list(categories),
                cfg.k_category,
                exclude={gold_category},
            )
        ]
    except PhraseLookupError as exc:
        logger.warning("category candidates degraded: %s", exc)
        cand.categories = []

    cand.polarities = [p for p in polarities if p != gold_polarity]
    return cand


def mixed_element_candidates(
    sentence: Sentence,
    cand: CandidateSet,
    emb: EmbeddingTable,
    cfg: GenerationConfig,
    rng: random.Random,
) -> CandidateSet:
    """Fill the opinion+polarity and category+polarity pair families."""
    if not cand.polarities:
        raise ComposeError(
            "polarity", cand.quad_index, "no alternative polarity labels exist"
        )
    cand.opinion_polarity = []
    for span_cand in cand.opinions:
        text = sentence.span_text(span_cand.span)
        paired: list[str] = []
        if text in emb:
            ranked = top_k_similar(emb, text, cand.polarities, cfg.k_polarity_pair)
            paired = [label for label, _ in ranked]
        if not paired:
            logger.warning(
                "no embedding for opinion %r or polarity labels; pairing with %r",
                text,
                cand.polarities[0],
            )
            paired = [cand.polarities[0]]
        for label in paired:
            cand.opinion_polarity.append((span_cand, label))
    cand.category_polarity = [
        (category, rng.choice(cand.polarities)) for category in cand.categories
    ]
    return cand


def build_candidates(
    example: AnnotatedExample,
    tree: ConstituentTree,
    emb: EmbeddingTable,
    categories: CategoryList,
    polarities: PolarityList,
    cfg: GenerationConfig,
    rng: random.Random,
) -> list[CandidateSet]:
    """Full per-quad candidate sets (single then mixed families)."""
    sets = []
    for qi in range(len(example.quads)):
        cand = single_element_candidates(
            example, qi, tree, emb, categories, polarities, cfg
        )
        sets.append(mixed_element_candidates(example.sentence, cand, emb, cfg, rng))
    return sets


def _whitespace_key(text: str) -> str:
    return " ".join(text.split())


def _family_items(
    sentence: Sentence, cand: CandidateSet, family: str
) -> list[tuple[dict[str, str], tuple[str, ...]]]:
    """(replacements, altered) pairs for one family, in rank order."""
    if family == "aspect":
        return [
            ({"aspect": sentence.span_text(c.span)}, ("aspect",))
            for c in cand.aspects
        ]
    if family == "opinion":
        return [
            ({"opinion": sentence.span_text(c.span)}, ("opinion",))
            for c in cand.opinions
        ]
    if family == "category":
        return [({"category": c}, ("category",)) for c in cand.categories]
    if family == "polarity":
        return [({"polarity": p}, ("polarity",)) for p in cand.polarities]
    if family == "opinion_polarity":
        return [
            (
                {"opinion": sentence.span_text(c.span), "polarity": p},
                ("opinion", "polarity"),
            )
            for c, p in cand.opinion_polarity
        ]
    if family == "category_polarity":
        return [
            ({"category": c, "polarity": p}, ("category", "polarity"))
            for c, p in cand.category_polarity
        ]
    raise ValueError(f"unknown family {family!r}")


def _apply_replacements(quad: SurfaceQuad, repl: dict[str, str]) -> SurfaceQuad:
    return replace(quad, **repl)


def compose_listwise(
    example: AnnotatedExample,
    candidate_sets: Sequence[CandidateSet],
    cfg: GenerationConfig,
    mapping: ElementMapping = DEFAULT_MAPPING,
) -> ListwiseSample:
    """Assemble one sample: prompt, gold rendering, and N distinct negatives.

    Slot i draws from family FAMILY_ORDER[i % 6] of quad (i % #quads); a
    rendering that collides with the gold or an earlier negative is skipped
    in favor of the next-ranked candidate.
    """
    sentence = example.sentence
    gold_quads = example.surface_quads()
    gold_rendering = render(gold_quads, mapping)
    used = {_whitespace_key(gold_rendering)}
    cursors: dict[tuple[int, str], int] = {}
    negatives: list[str] = []
    provenance: list[Perturbation] = []

    for slot in range(cfg.negatives_per_sample):
        family = FAMILY_ORDER[slot % len(FAMILY_ORDER)]
        quad_index = slot % len(gold_quads)
        cand = candidate_sets[quad_index]
        items = _family_items(sentence, cand, family)
        cursor = cursors.get((quad_index, family), 0)
        chosen = None
        while cursor < len(items):
            repl, altered = items[cursor]
            cursor += 1
            perturbed = list(gold_quads)
            perturbed[quad_index] = _apply_replacements(
                gold_quads[quad_index], repl
            )
            rendering = render(perturbed, mapping)
            key = _whitespace_key(rendering)
            if key in used:
                continue
            used.add(key)
            chosen = (rendering, Perturbation(altered, repl, quad_index))
            break
        cursors[(quad_index, family)] = cursor
        if chosen is None:
            raise ComposeError(
                family,
                quad_index,
                f"{len(items)} candidates, all duplicates or spent",
            )
        negatives.append(chosen[0])
        provenance.append(chosen[1])

    return ListwiseSample(
        example_id=sentence.id,
        prompt=build_prompt(sentence),
        gold=gold_rendering,
        negatives=tuple(negatives),
        target=(1,) + (0,) * cfg.negatives_per_sample,
        provenance=tuple(provenance),
    )


def example_rng(seed: int, example_id: str) -> random.Random:
    # String seeding hashes via sha512, so this is stable across runs and
    # platforms and independent of example order.
    return random.Random(f"{seed}:{example_id}")


def generate_samples(
    examples: Sequence[AnnotatedExample],
    trees: Sequence[ConstituentTree],
    emb: EmbeddingTable,
    categories: CategoryList,
    polarities: PolarityList,
    cfg: GenerationConfig,
    mapping: ElementMapping = DEFAULT_MAPPING,
) -> Iterator[tuple[AnnotatedExample, ListwiseSample | ComposeError]]:
    """Drive candidate generation over a corpus, one sample per example.

    Composition failures are yielded instead of raised so the caller decides
    whether to skip or abort.
    """
    if len(examples) != len(trees):
        raise ValueError(
            f"{len(examples)} examples but {len(trees)} parse trees; "
            "the parse file must be line-aligned with the dataset"
        )
    for example, tree in zip(examples, trees):
        rng = example_rng(cfg.seed, example.sentence.id)
        try:
            sets = build_candidates(
                example, tree, emb, categories, polarities, cfg, rng
            )
            yield example, compose_listwise(example, sets, cfg, mapping)
        except ComposeError as exc:
            yield example, exc
