#!/usr/bin/env python3
"""Regenerate the pinned test fixtures under tests/fixtures/.

Everything here is deterministic: corpora, parses, and embeddings are pure
functions of fixed seeds, so reruns are byte-identical and tests can pin
exact outputs. Run from the repository root:

    python tools/make_fixtures.py
"""

from __future__ import annotations

import random
from pathlib import Path

from quadpref.corpus import (
    IMPLICIT,
    AnnotatedExample,
    Quad,
    Sentence,
    example_to_jsonl,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

NOUNS = [
    "pasta", "waiter", "pizza", "staff", "decor", "wine", "menu",
    "bartender", "dessert", "soup", "salad", "chef", "patio", "music",
    "bread", "coffee", "steak", "terrace", "lighting", "crowd",
]
ADJECTIVES = [
    "delicious", "rude", "bland", "cozy", "stale", "friendly", "slow",
    "crisp", "salty", "attentive", "noisy", "fresh", "greasy", "charming",
    "bitter", "warm", "soggy", "polite", "dim", "lively",
]
CATEGORIES = [
    "food quality", "food prices", "food general", "service general",
    "ambience general", "drinks quality", "drinks prices",
    "restaurant general", "location general",
]
POLARITIES = ["positive", "negative", "neutral"]

EMBED_DIM = 16


def phrase_vector(phrase: str, dim: int = EMBED_DIM) -> list[float]:
    rng = random.Random(f"emb:{phrase}")
    vec = [rng.uniform(-1.0, 1.0) for _ in range(dim)]
    if all(v == 0.0 for v in vec):
        vec[0] = 1.0
    return vec


def write_embeddings(path: Path, phrases: list[str]) -> None:
    seen = []
    for p in phrases:
        if p not in seen:
            seen.append(p)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim {EMBED_DIM}\n")
        for phrase in seen:
            values = " ".join(repr(v) for v in phrase_vector(phrase))
            fh.write(f"{phrase}\t{values}\n")


def _pattern_a(i, rng):
    n1, n2 = rng.sample(NOUNS, 2)
    a1, a2 = rng.sample(ADJECTIVES, 2)
    c1, c2 = rng.choice(CATEGORIES), rng.choice(CATEGORIES)
    p1, p2 = rng.choice(POLARITIES), rng.choice(POLARITIES)
    text = f"the {n1} was {a1} and the {n2} was {a2} ."
    tree = (
        f"(S (S (NP (DT the) (NN {n1})) (VP (VBD was) (ADJP (JJ {a1})))) "
        f"(CC and) (S (NP (DT the) (NN {n2})) (VP (VBD was) (ADJP (JJ {a2})))) (. .))"
    )
    quads = (
        Quad((1, 2), (3, 4), c1, p1),
        Quad((6, 7), (8, 9), c2, p2),
    )
    return text, tree, quads


def _pattern_b(i, rng):
    n1, n2 = rng.sample(NOUNS, 2)
    a1, a2 = rng.sample(ADJECTIVES, 2)
    c1 = rng.choice(CATEGORIES)
    p1 = rng.choice(POLARITIES)
    text = f"the {n1} was really {a1} despite the {a2} {n2} ."
    tree = (
        f"(S (NP (DT the) (NN {n1})) (VP (VBD was) (ADJP (RB really) (JJ {a1})) "
        f"(PP (IN despite) (NP (DT the) (JJ {a2}) (NN {n2})))) (. .))"
    )
    quads = (Quad((1, 2), (4, 5), c1, p1),)
    return text, tree, quads


def _pattern_c(i, rng):
    # Implicit aspect on the first quad.
    n2 = rng.choice(NOUNS)
    a1, a2 = rng.sample(ADJECTIVES, 2)
    c1, c2 = rng.choice(CATEGORIES), rng.choice(CATEGORIES)
    p1, p2 = rng.choice(POLARITIES), rng.choice(POLARITIES)
    text = f"overall it was {a1} though the {n2} seemed {a2} ."
    tree = (
        f"(S (ADVP (RB overall)) (NP (PRP it)) (VP (VBD was) (ADJP (JJ {a1}))) "
        f"(SBAR (IN though) (S (NP (DT the) (NN {n2})) (VP (VBD seemed) "
        f"(ADJP (JJ {a2}))))) (. .))"
    )
    quads = (
        Quad(IMPLICIT, (3, 4), c1, p1),
        Quad((6, 7), (8, 9), c2, p2),
    )
    return text, tree, quads


def _pattern_d(i, rng):
    # Implicit opinion; "favorite" supplies a competing adjective leaf.
    n1, n2 = rng.sample(NOUNS, 2)
    c1 = rng.choice(CATEGORIES)
    p1 = rng.choice(POLARITIES)
    text = f"the {n1} was our favorite part of the {n2} ."
    tree = (
        f"(S (NP (DT the) (NN {n1})) (VP (VBD was) (NP (NP (PRP$ our) "
        f"(JJ favorite) (NN part)) (PP (IN of) (NP (DT the) (NN {n2}))))) (. .))"
    )
    quads = (Quad((1, 2), IMPLICIT, c1, p1),)
    return text, tree, quads


def build_audit_corpus():
    rng = random.Random("audit-corpus-v1")
    patterns = [_pattern_a] * 20 + [_pattern_b] * 15 + [_pattern_c] * 8 + [_pattern_d] * 7
    examples = []
    trees = []
    for i, pattern in enumerate(patterns):
        text, tree, quads = pattern(i, rng)
        sentence = Sentence.from_text(f"audit-{i:04d}", text)
        examples.append(AnnotatedExample(sentence=sentence, quads=quads))
        trees.append(tree)
    return examples, trees


def build_support_sentence():
    text = "their support page is very buggy, and the support person is unhelpful."
    sentence = Sentence.from_text("support-0001", text)
    tree = (
        "(S (S (NP (PRP$ their) (NN support) (NN page)) (VP (VBZ is) "
        "(ADJP (RB very) (JJ buggy)))) (, ,) (CC and) (S (NP (DT the) "
        "(NN support) (NN person)) (VP (VBZ is) (ADJP (JJ unhelpful)))) (. .))"
    )
    quads = (
        Quad((1, 3), (5, 6), "support general", "negative"),
        Quad((9, 11), (12, 13), "support general", "negative"),
    )
    return AnnotatedExample(sentence=sentence, quads=quads), tree


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)

    examples, trees = build_audit_corpus()
    with open(FIXTURES / "audit_corpus.jsonl", "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(example_to_jsonl(ex) + "\n")
    with open(FIXTURES / "audit_corpus.parses", "w", encoding="utf-8") as fh:
        for tree in trees:
            fh.write(tree + "\n")

    phrases = (
        CATEGORIES
        + POLARITIES
        + NOUNS
        + ADJECTIVES
        + [f"the {n}" for n in NOUNS]
        + ["it", "favorite", "part"]
    )
    write_embeddings(FIXTURES / "audit_embeddings.tsv", phrases)

    support_example, support_tree = build_support_sentence()
    with open(FIXTURES / "support_sentence.jsonl", "w", encoding="utf-8") as fh:
        fh.write(example_to_jsonl(support_example) + "\n")
    with open(FIXTURES / "support_sentence.parse", "w", encoding="utf-8") as fh:
        fh.write(support_tree + "\n")

    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()
