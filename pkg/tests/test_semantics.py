import math
import random

import pytest

from quadpref.semantics import (
    EmbeddingFormatError,
    EmbeddingTable,
    PhraseLookupError,
    cosine,
    load_embeddings,
    top_k_similar,
    write_embeddings,
)


def scalar_cosine(a, b):
    """Independent oracle: naive scalar dot/norm loop."""
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return dot / (na * nb)


def random_table(rng, n, dim):
    entries = {
        f"p{i:03d}": [rng.uniform(-1, 1) for _ in range(dim)] for i in range(n)
    }
    return EmbeddingTable(dim, entries), entries


class TestLoad:
    def test_two_rows(self, tmp_path):
        p = tmp_path / "emb.tsv"
        p.write_text("dim 4\nfoo\t1 0 0 0\nbar\t0 1 0 0\n", encoding="utf-8")
        table = load_embeddings(p)
        assert len(table) == 2
        assert table.dimension == 4

    def test_dimension_mismatch_names_phrase(self, tmp_path):
        p = tmp_path / "emb.tsv"
        p.write_text("dim 4\nfoo\t1 0 0\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="foo"):
            load_embeddings(p)

    def test_zero_vector_rejected(self, tmp_path):
        p = tmp_path / "emb.tsv"
        p.write_text("dim 2\nfoo\t0 0\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="zero"):
            load_embeddings(p)

    def test_duplicate_phrase_rejected(self, tmp_path):
        p = tmp_path / "emb.tsv"
        p.write_text("dim 2\nfoo\t1 0\nfoo\t0 1\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="duplicate"):
            load_embeddings(p)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "emb.tsv"
        p.write_text("dimension 2\nfoo\t1 0\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="dim"):
            load_embeddings(p)

    def test_write_read_roundtrip(self, tmp_path):
        rng = random.Random(3)
        table, entries = random_table(rng, 10, 8)
        p = tmp_path / "emb.tsv"
        write_embeddings(p, table)
        again = load_embeddings(p)
        for phrase in entries:
            assert list(again.vector(phrase)) == list(table.vector(phrase))


class TestCosine:
    def test_self_similarity_is_one(self, audit_embeddings):
        for phrase in list(audit_embeddings.phrases())[:10]:
            assert abs(cosine(audit_embeddings, phrase, phrase) - 1.0) < 1e-12

    def test_orthogonal_vectors(self):
        table = EmbeddingTable(2, {"x": [1, 0], "y": [0, 1]})
        assert cosine(table, "x", "y") == 0.0

    def test_missing_phrase_named(self):
        table = EmbeddingTable(2, {"x": [1, 0]})
        with pytest.raises(PhraseLookupError, match="ghost"):
            cosine(table, "x", "ghost")

    def test_matches_scalar_oracle(self):
        rng = random.Random(17)
        table, entries = random_table(rng, 20, 8)
        phrases = list(entries)
        for _ in range(100):
            a, b = rng.choice(phrases), rng.choice(phrases)
            got = cosine(table, a, b)
            assert abs(got - scalar_cosine(entries[a], entries[b])) < 1e-12

    def test_symmetry(self):
        rng = random.Random(29)
        table, entries = random_table(rng, 12, 6)
        phrases = list(entries)
        for _ in range(50):
            a, b = rng.choice(phrases), rng.choice(phrases)
            assert cosine(table, a, b) == cosine(table, b, a)

    def test_scale_invariance(self):
        rng = random.Random(41)
        _, entries = random_table(rng, 8, 5)
        table = EmbeddingTable(5, entries)
        scaled = EmbeddingTable(
            5, {k: [3.7 * x for x in v] for k, v in entries.items()}
        )
        phrases = list(entries)
        for a in phrases:
            for b in phrases:
                assert abs(cosine(table, a, b) - cosine(scaled, a, b)) < 1e-9


def scan_oracle(entries, query, pool, k, exclude=()):
    """Independent oracle: exhaustive scan plus deterministic sort."""
    seen = set()
    scored = []
    for p in pool:
        if p in exclude or p in seen or p not in entries:
            seen.add(p)
            continue
        seen.add(p)
        scored.append((p, scalar_cosine(entries[query], entries[p])))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [p for p, _ in scored[:k]]


class TestTopK:
    def test_duplicate_vector_wins(self):
        table = EmbeddingTable(
            2, {"q": [1, 0], "same": [2, 0], "ortho": [0, 1]}
        )
        got = top_k_similar(table, "q", ["same", "ortho"], 1)
        assert [p for p, _ in got] == ["same"]

    def test_k_at_least_pool_returns_whole_pool_sorted(self):
        table = EmbeddingTable(
            2, {"q": [1, 0], "a": [1, 0.1], "b": [0.5, 1], "c": [-1, 0]}
        )
        got = [p for p, _ in top_k_similar(table, "q", ["a", "b", "c"], 10)]
        assert got == ["a", "b", "c"]

    def test_missing_query_raises(self):
        table = EmbeddingTable(2, {"a": [1, 0]})
        with pytest.raises(PhraseLookupError):
            top_k_similar(table, "ghost", ["a"], 1)

    def test_missing_pool_members_skipped_with_warning(self, caplog):
        table = EmbeddingTable(2, {"q": [1, 0], "a": [0, 1]})
        with caplog.at_level("WARNING"):
            got = top_k_similar(table, "q", ["a", "ghost"], 5)
        assert [p for p, _ in got] == ["a"]
        assert "ghost" in caplog.text

    def test_matches_scan_oracle(self):
        rng = random.Random(53)
        for _ in range(60):
            dim = rng.randint(2, 16)
            table, entries = random_table(rng, rng.randint(3, 30), dim)
            phrases = list(entries)
            query = rng.choice(phrases)
            pool = [rng.choice(phrases) for _ in range(rng.randint(1, 25))]
            k = rng.randint(1, 5)
            exclude = {query} if rng.random() < 0.5 else set()
            got = [p for p, _ in top_k_similar(table, query, pool, k, exclude)]
            assert got == scan_oracle(entries, query, pool, k, exclude)

    def test_prefix_property(self):
        rng = random.Random(59)
        table, entries = random_table(rng, 25, 8)
        pool = list(entries)
        for k in range(1, 8):
            shorter = [p for p, _ in top_k_similar(table, "p000", pool, k)]
            longer = [p for p, _ in top_k_similar(table, "p000", pool, k + 1)]
            assert longer[: len(shorter)] == shorter
