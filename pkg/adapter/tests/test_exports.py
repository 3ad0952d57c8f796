import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from asqp_adapter.chunker import chunk_tree, collect_span_texts, serialize
from asqp_adapter.cli import Manifest, export_embeddings, export_parses, main
from asqp_adapter.encoder import encode_phrase
from asqp_adapter.tagging import tag_token

FIXTURE_CORPUS = (
    Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "audit_corpus.jsonl"
)


def canonical_record(text, tokens, quads=None):
    return {
        "id": "t",
        "text": text,
        "tokens": tokens,
        "quads": quads
        or [
            {"aspect": [0, 1], "opinion": None, "category": "food quality",
             "polarity": "positive"}
        ],
    }


def simple_tokens(text):
    out = []
    at = 0
    for word in text.split(" "):
        start = text.index(word, at)
        out.append([word, start, start + len(word)])
        at = start + len(word)
    return out


def write_dataset(path, records):
    path.write_text(
        "\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8"
    )


def balanced(tree_line: str) -> bool:
    depth = 0
    for ch in tree_line:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def leaf_tokens(tree_line: str) -> list[str]:
    # A leaf is "(TAG token)"; tokens never contain spaces or raw parens.
    out = []
    parts = tree_line.replace("(", " ( ").replace(")", " ) ").split()
    for i, part in enumerate(parts):
        if part == ")" and i >= 2 and parts[i - 2] != "(" and parts[i - 1] not in "()":
            if parts[i - 2] == ")":
                continue
            out.append(parts[i - 1])
    return out


class TestTagging:
    def test_lexicon_and_suffixes(self):
        assert tag_token("the") == "DT"
        assert tag_token("their") == "PRP$"
        assert tag_token("buggy") == "JJ"
        assert tag_token("quickly") == "RB"
        assert tag_token("walked") == "VBD"
        assert tag_token("dishes") == "NNS"
        assert tag_token("page") == "NN"
        assert tag_token("(") == "-LRB-"
        assert tag_token("42") == "CD"


class TestChunker:
    def test_leaves_reproduce_tokens(self):
        tokens = "their support page is very buggy , and it works".split()
        tree = chunk_tree(tokens)
        line = serialize(tree)
        assert balanced(line)
        assert leaf_tokens(line) == tokens

    def test_paren_tokens_escaped(self):
        line = serialize(chunk_tree(["cheap", "(", "really", ")", "food"]))
        assert "-LRB-" in line and "-RRB-" in line
        assert "( (" not in line.replace(") (", "")
        assert leaf_tokens(line) == ["cheap", "-LRB-", "really", "-RRB-", "food"]

    def test_noun_phrase_grouping(self):
        line = serialize(chunk_tree("the support page was buggy".split()))
        assert "(NP (DT the) (NN support) (NN page))" in line

    def test_pp_merge(self):
        line = serialize(chunk_tree("part of the menu".split()))
        assert "(PP (IN of) (NP (DT the) (NN menu)))" in line

    def test_zero_tokens_rejected(self):
        with pytest.raises(ValueError):
            chunk_tree([])

    def test_span_texts_cover_windows_and_chunks(self):
        text = "the support page is buggy"
        offsets = [(m[1], m[2]) for m in simple_tokens(text)]
        spans = collect_span_texts(text, offsets, max_len=2)
        assert "support page" in spans
        assert "the support page" in spans  # NP chunk span, longer than max_len


class TestEncoder:
    def test_unit_norm_and_determinism(self):
        a = encode_phrase("food quality")
        b = encode_phrase("food quality")
        assert a == b
        assert math.isclose(sum(v * v for v in a), 1.0, rel_tol=1e-9)

    def test_distinct_phrases_differ(self):
        assert encode_phrase("food quality") != encode_phrase("service general")

    def test_dimension(self):
        assert len(encode_phrase("x", dim=32)) == 32


class TestExports:
    def _manifest(self, tmp_path, dataset):
        return Manifest(
            dataset=str(dataset),
            parse_file=str(tmp_path / "out.parses"),
            embedding_file=str(tmp_path / "out.emb"),
        )

    def test_line_alignment_on_fixture_corpus(self, tmp_path):
        manifest = self._manifest(tmp_path, FIXTURE_CORPUS)
        stats = export_parses(manifest)
        dataset_lines = [
            l for l in FIXTURE_CORPUS.read_text(encoding="utf-8").splitlines() if l
        ]
        parse_lines = Path(manifest.parse_file).read_text().splitlines()
        assert len(parse_lines) == len(dataset_lines) == stats["sentences"]
        for line, raw in zip(parse_lines, dataset_lines):
            assert balanced(line)
            record = json.loads(raw)
            want = [t for t, _, _ in record["tokens"]]
            assert leaf_tokens(line) == want

    def test_embeddings_cover_categories_and_polarities(self, tmp_path):
        manifest = self._manifest(tmp_path, FIXTURE_CORPUS)
        export_embeddings(manifest)
        lines = Path(manifest.embedding_file).read_text().splitlines()
        assert lines[0] == "dim 64"
        phrases = {l.split("\t", 1)[0] for l in lines[1:]}
        wanted = set()
        for raw in FIXTURE_CORPUS.read_text(encoding="utf-8").splitlines():
            for quad in json.loads(raw)["quads"]:
                wanted.add(quad["category"])
                wanted.add(quad["polarity"])
        assert wanted <= phrases
        assert len(phrases) == len(lines) - 1  # no duplicate rows

    def test_rows_parse_and_have_positive_norm(self, tmp_path):
        manifest = self._manifest(tmp_path, FIXTURE_CORPUS)
        export_embeddings(manifest)
        lines = Path(manifest.embedding_file).read_text().splitlines()
        for line in lines[1:]:
            phrase, values = line.split("\t", 1)
            vec = [float(v) for v in values.split()]
            assert len(vec) == 64
            assert sum(v * v for v in vec) > 0

    def test_byte_identical_reruns(self, tmp_path):
        manifest = self._manifest(tmp_path, FIXTURE_CORPUS)
        export_parses(manifest)
        export_embeddings(manifest)
        parses1 = Path(manifest.parse_file).read_bytes()
        emb1 = Path(manifest.embedding_file).read_bytes()
        export_parses(manifest)
        export_embeddings(manifest)
        assert Path(manifest.parse_file).read_bytes() == parses1
        assert Path(manifest.embedding_file).read_bytes() == emb1

    def test_empty_dataset(self, tmp_path):
        dataset = tmp_path / "empty.jsonl"
        dataset.write_text("", encoding="utf-8")
        manifest = self._manifest(tmp_path, dataset)
        manifest_path = tmp_path / "m.json"
        manifest_path.write_text(
            json.dumps(
                {
                    "dataset": manifest.dataset,
                    "parse_file": manifest.parse_file,
                    "embedding_file": manifest.embedding_file,
                }
            ),
            encoding="utf-8",
        )
        assert main(["export-all", "--manifest", str(manifest_path)]) == 0
        assert Path(manifest.parse_file).read_text() == ""

    def test_tokenless_sentence_gets_placeholder_and_sidecar(self, tmp_path, capsys):
        dataset = tmp_path / "odd.jsonl"
        write_dataset(
            dataset,
            [
                canonical_record(
                    "", [], quads=[{"aspect": None, "opinion": None,
                                    "category": "restaurant general",
                                    "polarity": "positive"}]
                ),
                canonical_record("fine food", simple_tokens("fine food")),
            ],
        )
        manifest = self._manifest(tmp_path, dataset)
        stats = export_parses(manifest)
        assert stats == {"sentences": 2, "placeholders": 1}
        lines = Path(manifest.parse_file).read_text().splitlines()
        assert lines[0] == "(S (XX placeholder))"
        sidecar = Path(manifest.parse_file).with_suffix(".log")
        assert "placeholder" in sidecar.read_text()

    def test_non_canonical_dataset_rejected(self, tmp_path):
        dataset = tmp_path / "raw.jsonl"
        dataset.write_text(json.dumps({"text": "no tokens here"}) + "\n")
        manifest = self._manifest(tmp_path, dataset)
        with pytest.raises(SystemExit, match="ingest"):
            export_parses(manifest)


class TestCli:
    def test_export_all_summary(self, tmp_path):
        manifest_path = tmp_path / "m.json"
        manifest_path.write_text(
            json.dumps(
                {
                    "dataset": str(FIXTURE_CORPUS),
                    "parse_file": str(tmp_path / "o.parses"),
                    "embedding_file": str(tmp_path / "o.emb"),
                }
            ),
            encoding="utf-8",
        )
        result = subprocess.run(
            [sys.executable, "-m", "asqp_adapter", "export-all",
             "--manifest", str(manifest_path)],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
        summary = json.loads(result.stdout)
        assert summary["parses"]["sentences"] == 50
        assert summary["embeddings"]["dim"] == 64
        assert summary["manifest"]["parser"] == "lexicon-chunker-v1"

    def test_unknown_manifest_key_rejected(self, tmp_path):
        manifest_path = tmp_path / "m.json"
        manifest_path.write_text(json.dumps({"dataset": "x", "oops": 1}))
        with pytest.raises(SystemExit, match="oops|missing"):
            main(["export-parses", "--manifest", str(manifest_path)])

    def test_missing_dataset_exit_2(self, tmp_path):
        manifest_path = tmp_path / "m.json"
        manifest_path.write_text(
            json.dumps(
                {
                    "dataset": str(tmp_path / "nope.jsonl"),
                    "parse_file": str(tmp_path / "o.parses"),
                    "embedding_file": str(tmp_path / "o.emb"),
                }
            )
        )
        assert main(["export-parses", "--manifest", str(manifest_path)]) == 2
