"""Bracketed constituency trees: parsing, tree distance, POS-pattern search.

Trees arrive as one labeled bracketing per line, aligned with the dataset's
sentences. Literal parentheses inside tokens are escaped as -LRB- / -RRB-.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

TokenSpan = tuple[int, int]

_TOKEN_ESCAPES = {"(": "-LRB-", ")": "-RRB-"}
_TOKEN_UNESCAPES = {v: k for k, v in _TOKEN_ESCAPES.items()}


class TreeParseError(ValueError):
    """Malformed bracketed tree; carries the character position."""

    def __init__(self, position: int, reason: str):
        super().__init__(f"at character {position}: {reason}")
        self.position = position
        self.reason = reason


class SpanRangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TreeNode:
    """A constituent or preterminal. Leaves carry the token and its index."""

    label: str
    children: tuple["TreeNode", ...] = ()
    token: str | None = None
    token_index: int | None = None
    span: TokenSpan = (0, 0)

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def preorder(self) -> Iterator["TreeNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def escape_token(text: str) -> str:
    for raw, esc in _TOKEN_ESCAPES.items():
        text = text.replace(raw, esc)
    return text


def unescape_token(text: str) -> str:
    for esc, raw in _TOKEN_UNESCAPES.items():
        text = text.replace(esc, raw)
    return text


# Coarse POS classes; matching "the same POS pattern" should not be defeated
# by inflection (plural nouns, comparative adjectives, verb tense).
_COARSE_PREFIXES = (("NN", "NOUN"), ("JJ", "ADJ"), ("VB", "VERB"), ("RB", "ADV"))


def coarse_tag(tag: str) -> str:
    for prefix, coarse in _COARSE_PREFIXES:
        if tag.startswith(prefix):
            return coarse
    return tag


@dataclass(frozen=True)
class SpanCandidate:
    span: TokenSpan
    pos_tags: tuple[str, ...]
    node: TreeNode


class ConstituentTree:
    """Immutable parse tree over one sentence's tokens."""

    def __init__(self, root: TreeNode):
        self.root = root
        self.leaves: tuple[TreeNode, ...] = tuple(
            n for n in _ordered_nodes(root) if n.is_leaf
        )
        self._parent: dict[TreeNode, TreeNode | None] = {root: None}
        self._depth: dict[TreeNode, int] = {root: 0}
        stack = [root]
        while stack:
            node = stack.pop()
            for child in node.children:
                self._parent[child] = node
                self._depth[child] = self._depth[node] + 1
                stack.append(child)

    def __len__(self) -> int:
        return len(self.leaves)

    def tokens(self) -> tuple[str, ...]:
        return tuple(leaf.token for leaf in self.leaves)

    def pos_tags(self) -> tuple[str, ...]:
        return tuple(leaf.label for leaf in self.leaves)

    def nodes(self) -> Iterator[TreeNode]:
        return _ordered_nodes(self.root)

    def parent(self, node: TreeNode) -> TreeNode | None:
        return self._parent[node]

    def depth(self, node: TreeNode) -> int:
        return self._depth[node]

    def check_span(self, span: TokenSpan) -> None:
        s, e = span
        if not (0 <= s < e <= len(self.leaves)):
            raise SpanRangeError(
                f"span {span} out of range for {len(self.leaves)} tokens"
            )

    def covering_node(self, span: TokenSpan) -> TreeNode:
        """Smallest node whose span contains the given token range."""
        self.check_span(span)
        s, e = span
        node = self.root
        descended = True
        while descended:
            descended = False
            for child in node.children:
                if child.span[0] <= s and e <= child.span[1]:
                    node = child
                    descended = True
                    break
        return node

    def __eq__(self, other) -> bool:
        return isinstance(other, ConstituentTree) and serialize(self) == serialize(other)

    def __hash__(self):
        return hash(serialize(self))


def _ordered_nodes(root: TreeNode) -> Iterator[TreeNode]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def _lex(text: str) -> Iterator[tuple[str, int]]:
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch, i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], i
            i = j


def parse_bracketed(text: str) -> ConstituentTree:
    """Parse one labeled bracketing into a ConstituentTree.

    Raises TreeParseError (with character position) on unbalanced
    parentheses, empty constituents, missing labels, or stray tokens.
    """
    tokens = list(_lex(text))
    if not tokens:
        raise TreeParseError(0, "empty input")
    pos = 0
    counter = [0]

    def parse_node() -> TreeNode:
        nonlocal pos
        tok, at = tokens[pos]
        if tok != "(":
            raise TreeParseError(at, f"expected '(' but found {tok!r}")
        pos += 1
        if pos >= len(tokens):
            raise TreeParseError(len(text), "unbalanced parentheses at end of input")
        label, label_at = tokens[pos]
        if label in ("(", ")"):
            raise TreeParseError(label_at, "constituent is missing a label")
        pos += 1
        if pos >= len(tokens):
            raise TreeParseError(len(text), "unbalanced parentheses at end of input")
        nxt, nxt_at = tokens[pos]
        if nxt == ")":
            raise TreeParseError(nxt_at, f"constituent {label!r} is empty")
        if nxt != "(":
            # Preterminal: exactly one surface token.
            index = counter[0]
            counter[0] += 1
            leaf = TreeNode(
                label=label,
                token=unescape_token(nxt),
                token_index=index,
                span=(index, index + 1),
            )
            pos += 1
            if pos >= len(tokens):
                raise TreeParseError(
                    len(text), "unbalanced parentheses at end of input"
                )
            closer, closer_at = tokens[pos]
            if closer != ")":
                raise TreeParseError(
                    closer_at,
                    f"stray token {closer!r} after leaf {nxt!r}; "
                    "preterminals hold exactly one token",
                )
            pos += 1
            return leaf
        children = []
        while True:
            if pos >= len(tokens):
                raise TreeParseError(
                    len(text), "unbalanced parentheses at end of input"
                )
            tok, at = tokens[pos]
            if tok == ")":
                pos += 1
                break
            if tok != "(":
                raise TreeParseError(
                    at, f"stray token {tok!r} among constituents of {label!r}"
                )
            children.append(parse_node())
        return TreeNode(
            label=label,
            children=tuple(children),
            span=(children[0].span[0], children[-1].span[1]),
        )

    root = parse_node()
    if pos != len(tokens):
        tok, at = tokens[pos]
        reason = (
            "unbalanced parentheses: extra ')'"
            if tok == ")"
            else f"trailing content {tok!r} after complete tree"
        )
        raise TreeParseError(at, reason)
    return ConstituentTree(root)


def _serialize_node(node: TreeNode, out: list[str]) -> None:
    if node.is_leaf:
        out.append(f"({node.label} {escape_token(node.token)})")
        return
    out.append(f"({node.label} ")
    for i, child in enumerate(node.children):
        if i:
            out.append(" ")
        _serialize_node(child, out)
    out.append(")")


def serialize(tree: ConstituentTree) -> str:
    out: list[str] = []
    _serialize_node(tree.root, out)
    return "".join(out)


def load_parse_file(path: str | Path) -> list[ConstituentTree]:
    """One bracketed tree per line, aligned with the dataset by line number."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                trees.append(parse_bracketed(line.strip()))
            except TreeParseError as exc:
                raise TreeParseError(
                    exc.position, f"line {line_no}: {exc.reason}"
                ) from exc
    return trees


def tree_distance(tree: ConstituentTree, span_a: TokenSpan, span_b: TokenSpan) -> int:
    """Edges on the path between the lowest covering nodes of the two spans."""
    node_a = tree.covering_node(span_a)
    node_b = tree.covering_node(span_b)
    da, db = tree.depth(node_a), tree.depth(node_b)
    dist = 0
    while da > db:
        node_a = tree.parent(node_a)
        da -= 1
        dist += 1
    while db > da:
        node_b = tree.parent(node_b)
        db -= 1
        dist += 1
    while node_a is not node_b:
        node_a = tree.parent(node_a)
        node_b = tree.parent(node_b)
        dist += 2
    return dist


def find_pos_matches(
    tree: ConstituentTree,
    pattern: Sequence[str],
    exclude: TokenSpan | None = None,
) -> list[SpanCandidate]:
    """All token windows whose POS tags match `pattern` under coarse tags.

    The `exclude` range itself is never returned. Results are ordered by
    start index.
    """
    if not pattern:
        raise ValueError("POS pattern must be non-empty")
    want = tuple(coarse_tag(t) for t in pattern)
    tags = tuple(coarse_tag(t) for t in tree.pos_tags())
    fine = tree.pos_tags()
    out: list[SpanCandidate] = []
    width = len(want)
    for start in range(len(tags) - width + 1):
        span = (start, start + width)
        if exclude is not None and span == tuple(exclude):
            continue
        if tags[start : start + width] == want:
            out.append(
                SpanCandidate(
                    span=span,
                    pos_tags=fine[start : start + width],
                    node=tree.covering_node(span),
                )
            )
    return out


def nearest_spans(
    tree: ConstituentTree,
    gold: TokenSpan,
    pattern: Sequence[str],
    k: int,
) -> list[SpanCandidate]:
    """The k pattern matches syntactically closest to `gold`.

    Ranked by tree distance, then absolute start-index offset, then start
    index, so the ordering is total and k-prefix stable.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tree.check_span(gold)
    matches = find_pos_matches(tree, pattern, exclude=gold)
    ranked = sorted(
        matches,
        key=lambda c: (
            tree_distance(tree, gold, c.span),
            abs(c.span[0] - gold[0]),
            c.span[0],
        ),
    )
    return ranked[:k]
