"""Chunk tagged tokens into a flat labeled constituency tree.

The output is a valid bracketed tree whose leaves reproduce the token
sequence exactly; structure is shallow (NP/ADJP/ADVP/VP/PP chunks under a
single S) but honest about it. Parentheses inside tokens are escaped as
-LRB- / -RRB- in the serialized form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tagging import tag_tokens

_NP_SET = {"DT", "PRP$", "JJ", "JJR", "JJS", "CD", "NN", "NNS", "NNP", "NNPS"}
_VERB_SET = {"MD", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "TO"}
_ADV_SET = {"RB", "RBR", "RBS"}
_ADJ_SET = {"JJ", "JJR", "JJS"}


@dataclass
class Node:
    label: str
    children: list["Node"] = field(default_factory=list)
    token: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.token is not None


def _escape(token: str) -> str:
    return token.replace("(", "-LRB-").replace(")", "-RRB-")


def serialize(node: Node) -> str:
    if node.is_leaf:
        return f"({node.label} {_escape(node.token)})"
    inner = " ".join(serialize(child) for child in node.children)
    return f"({node.label} {inner})"


PLACEHOLDER_TREE = "(S (XX placeholder))"


def chunk_tree(tokens: list[str]) -> Node:
    """Build the chunked tree for one token sequence (must be non-empty)."""
    if not tokens:
        raise ValueError("cannot build a tree over zero tokens")
    tags = tag_tokens(tokens)
    n = len(tokens)
    leaves = [Node(label=tags[i], token=tokens[i]) for i in range(n)]
    assigned = [False] * n
    items: list[tuple[int, Node]] = []

    # NP: maximal noun-ish runs trimmed to their last noun.
    i = 0
    while i < n:
        if tags[i] in _NP_SET:
            j = i
            while j < n and tags[j] in _NP_SET:
                j += 1
            last_noun = max(
                (k for k in range(i, j) if tags[k].startswith("NN")), default=None
            )
            if last_noun is not None:
                node = Node("NP", children=leaves[i : last_noun + 1])
                items.append((i, node))
                for k in range(i, last_noun + 1):
                    assigned[k] = True
                i = j
                continue
            i = j
        elif tags[i] == "PRP":
            items.append((i, Node("NP", children=[leaves[i]])))
            assigned[i] = True
            i += 1
        else:
            i += 1

    # ADJP: adverb prefix plus adjective run, trimmed to the last adjective.
    i = 0
    while i < n:
        if not assigned[i] and tags[i] in (_ADV_SET | _ADJ_SET):
            j = i
            while j < n and not assigned[j] and tags[j] in _ADV_SET:
                j += 1
            k = j
            while k < n and not assigned[k] and tags[k] in _ADJ_SET:
                k += 1
            if k > j:
                node = Node("ADJP", children=leaves[i:k])
                items.append((i, node))
                for p in range(i, k):
                    assigned[p] = True
                i = k
                continue
        i += 1

    # ADVP: leftover adverb runs.
    i = 0
    while i < n:
        if not assigned[i] and tags[i] in _ADV_SET:
            j = i
            while j < n and not assigned[j] and tags[j] in _ADV_SET:
                j += 1
            items.append((i, Node("ADVP", children=leaves[i:j])))
            for p in range(i, j):
                assigned[p] = True
            i = j
        else:
            i += 1

    # VP: verb runs.
    i = 0
    while i < n:
        if not assigned[i] and tags[i] in _VERB_SET:
            j = i
            while j < n and not assigned[j] and tags[j] in _VERB_SET:
                j += 1
            items.append((i, Node("VP", children=leaves[i:j])))
            for p in range(i, j):
                assigned[p] = True
            i = j
        else:
            i += 1

    for i in range(n):
        if not assigned[i]:
            items.append((i, leaves[i]))
    items.sort(key=lambda item: item[0])

    # Merge IN + NP into PP.
    merged: list[Node] = []
    idx = 0
    ordered = [node for _, node in items]
    while idx < len(ordered):
        node = ordered[idx]
        if (
            node.is_leaf
            and node.label == "IN"
            and idx + 1 < len(ordered)
            and ordered[idx + 1].label == "NP"
        ):
            merged.append(Node("PP", children=[node, ordered[idx + 1]]))
            idx += 2
        else:
            merged.append(node)
            idx += 1

    return Node("S", children=merged)


def collect_span_texts(text: str, offsets: list[tuple[int, int]], max_len: int = 4):
    """Span surface forms the candidate generator may query.

    All constituent spans are covered transitively by including every
    token window up to max_len plus full chunk spans.
    """
    n = len(offsets)
    spans = set()
    for i in range(n):
        for j in range(i + 1, min(n, i + max_len) + 1):
            spans.add(text[offsets[i][0] : offsets[j - 1][1]])
    tokens = [text[s:e] for s, e in offsets]
    if tokens:
        tree = chunk_tree(tokens)

        def walk(node: Node, start: int) -> int:
            if node.is_leaf:
                return start + 1
            begin = start
            for child in node.children:
                start = walk(child, start)
            spans.add(text[offsets[begin][0] : offsets[start - 1][1]])
            return start

        walk(tree, 0)
    return spans
