"""Deterministic lexicon + suffix POS tagging.

Good enough to drive chunking into labeled constituents; nothing here
pretends to be a trained tagger, and the identifier in the manifest says
so. Unknown words default to NN.
"""

from __future__ import annotations

import re

_LEXICON = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT",
    "these": "DT", "those": "DT", "some": "DT", "any": "DT", "no": "DT",
    "every": "DT", "each": "DT", "all": "DT",
    "my": "PRP$", "our": "PRP$", "your": "PRP$", "their": "PRP$",
    "his": "PRP$", "her": "PRP$", "its": "PRP$",
    "i": "PRP", "we": "PRP", "you": "PRP", "they": "PRP", "he": "PRP",
    "she": "PRP", "it": "PRP", "them": "PRP", "us": "PRP", "me": "PRP",
    "and": "CC", "but": "CC", "or": "CC", "nor": "CC", "yet": "CC",
    "of": "IN", "in": "IN", "on": "IN", "at": "IN", "with": "IN",
    "for": "IN", "from": "IN", "by": "IN", "despite": "IN", "during": "IN",
    "under": "IN", "over": "IN", "about": "IN", "against": "IN",
    "though": "IN", "although": "IN", "because": "IN", "if": "IN",
    "while": "IN", "than": "IN", "after": "IN", "before": "IN",
    "to": "TO",
    "was": "VBD", "were": "VBD", "did": "VBD", "had": "VBD",
    "is": "VBZ", "has": "VBZ", "does": "VBZ",
    "are": "VBP", "am": "VBP", "have": "VBP", "do": "VBP",
    "be": "VB", "been": "VBN", "being": "VBG",
    "will": "MD", "would": "MD", "can": "MD", "could": "MD",
    "should": "MD", "may": "MD", "might": "MD", "must": "MD",
    "very": "RB", "really": "RB", "quite": "RB", "too": "RB", "so": "RB",
    "not": "RB", "n't": "RB", "never": "RB", "always": "RB",
    "often": "RB", "overall": "RB", "here": "RB", "there": "RB",
    "also": "RB", "just": "RB", "still": "RB",
}

_PUNCT_TAGS = {
    ".": ".", "!": ".", "?": ".",
    ",": ",", ";": ":", ":": ":", "...": ":",
    "(": "-LRB-", ")": "-RRB-",
    "\"": "''", "'": "''", "`": "``",
    "-": ":", "--": ":",
    "$": "$", "#": "#", "%": "NN", "&": "CC",
}

_NUMBER = re.compile(r"^[+-]?(\d+([.,]\d+)*|\d+)$")

_ADJ_SUFFIXES = (
    "ous", "ful", "ive", "able", "ible", "less", "ish", "al", "ic",
    "ant", "ent", "y",
)


def tag_token(token: str) -> str:
    lowered = token.lower()
    if token in _PUNCT_TAGS:
        return _PUNCT_TAGS[token]
    if all(not ch.isalnum() for ch in token):
        return ":"
    if lowered in _LEXICON:
        return _LEXICON[lowered]
    if _NUMBER.match(token):
        return "CD"
    if lowered.endswith("ly") and len(lowered) > 3:
        return "RB"
    if lowered.endswith("ing") and len(lowered) > 4:
        return "VBG"
    if lowered.endswith("ed") and len(lowered) > 3:
        return "VBD"
    for suffix in _ADJ_SUFFIXES:
        if lowered.endswith(suffix) and len(lowered) > len(suffix) + 1:
            return "JJ"
    if lowered.endswith("s") and len(lowered) > 3 and not lowered.endswith(
        ("ss", "us", "is")
    ):
        return "NNS"
    return "NN"


def tag_tokens(tokens: list[str]) -> list[str]:
    return [tag_token(t) for t in tokens]
