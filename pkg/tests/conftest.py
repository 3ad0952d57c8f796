from __future__ import annotations

import random
from pathlib import Path

import pytest

from quadpref import corpus, semantics, syntax

FIXTURES = Path(__file__).parent / "fixtures"

POS_TAGS = ["NN", "NNS", "JJ", "JJR", "VBD", "VBZ", "RB", "DT", "IN", "CC"]
NODE_LABELS = ["S", "NP", "VP", "ADJP", "PP", "ADVP", "SBAR"]


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def audit_examples():
    return corpus.load_dataset(FIXTURES / "audit_corpus.jsonl")


@pytest.fixture(scope="session")
def audit_trees():
    return syntax.load_parse_file(FIXTURES / "audit_corpus.parses")


@pytest.fixture(scope="session")
def audit_embeddings():
    return semantics.load_embeddings(FIXTURES / "audit_embeddings.tsv")


@pytest.fixture(scope="session")
def support_example():
    return corpus.load_dataset(FIXTURES / "support_sentence.jsonl")[0]


@pytest.fixture(scope="session")
def support_tree():
    return syntax.load_parse_file(FIXTURES / "support_sentence.parse")[0]


def random_tree_text(rng: random.Random, n_tokens: int) -> str:
    """A random labeled bracketing over tokens w0..w{n-1}."""

    def build(lo: int, hi: int) -> str:
        if hi - lo == 1:
            return f"({rng.choice(POS_TAGS)} w{lo})"
        n_children = rng.randint(2, min(4, hi - lo))
        cuts = sorted(rng.sample(range(lo + 1, hi), n_children - 1))
        bounds = [lo, *cuts, hi]
        parts = [build(bounds[i], bounds[i + 1]) for i in range(n_children)]
        return f"({rng.choice(NODE_LABELS)} " + " ".join(parts) + ")"

    return build(0, n_tokens)


def bfs_node_distance(tree: syntax.ConstituentTree, a, b) -> int:
    """Independent oracle: BFS path length over the undirected node graph."""
    adjacency: dict = {}
    for node in tree.nodes():
        adjacency.setdefault(node, [])
        for child in node.children:
            adjacency[node].append(child)
            adjacency.setdefault(child, []).append(node)
    frontier = [a]
    seen = {a}
    depth = 0
    while frontier:
        if b in frontier:
            return depth
        nxt = []
        for node in frontier:
            for peer in adjacency[node]:
                if peer not in seen:
                    seen.add(peer)
                    nxt.append(peer)
        frontier = nxt
        depth += 1
    raise AssertionError("nodes are not connected")


def brute_force_covering(tree: syntax.ConstituentTree, span) -> syntax.TreeNode:
    """Deepest node containing the span, found by exhaustive scan."""
    s, e = span
    best = None
    for node in tree.nodes():
        if node.span[0] <= s and e <= node.span[1]:
            if best is None or tree.depth(node) > tree.depth(best):
                best = node
    assert best is not None
    return best
