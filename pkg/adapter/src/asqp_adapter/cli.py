"""Adapter CLI: export parses and embeddings for a canonical dataset.

    asqp-adapter export-parses     --manifest manifest.json
    asqp-adapter export-embeddings --manifest manifest.json
    asqp-adapter export-all        --manifest manifest.json

The manifest is JSON with at least {dataset, parse_file, embedding_file};
parser/encoder identifiers and the embedding dimension are recorded into
the effective manifest printed on success.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import ENCODER_ID, PARSER_ID
from .chunker import PLACEHOLDER_TREE, chunk_tree, collect_span_texts, serialize
from .encoder import DEFAULT_DIM, write_embedding_file


@dataclass
class Manifest:
    dataset: str
    parse_file: str
    embedding_file: str
    parser: str = PARSER_ID
    encoder: str = ENCODER_ID
    dim: int = DEFAULT_DIM
    max_span_len: int = 4


def load_manifest(path: str) -> Manifest:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    known = set(Manifest.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise SystemExit(f"error: unknown manifest keys: {sorted(unknown)}")
    missing = {"dataset", "parse_file", "embedding_file"} - set(raw)
    if missing:
        raise SystemExit(f"error: manifest missing keys: {sorted(missing)}")
    return Manifest(**raw)


@dataclass
class Record:
    text: str
    offsets: list[tuple[int, int]]
    categories: list[str]
    polarities: list[str]

    @property
    def tokens(self) -> list[str]:
        return [self.text[s:e] for s, e in self.offsets]


def read_dataset(path: str) -> list[Record]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SystemExit(f"error: line {line_no}: invalid JSON: {exc}")
            text = obj.get("text")
            tokens = obj.get("tokens")
            if not isinstance(text, str) or not isinstance(tokens, list):
                raise SystemExit(
                    f"error: line {line_no}: need canonical records with "
                    "'text' and 'tokens' (run the pipeline's ingest first)"
                )
            offsets = [(int(s), int(e)) for _, s, e in tokens]
            quads = obj.get("quads") or []
            records.append(
                Record(
                    text=text,
                    offsets=offsets,
                    categories=[q["category"] for q in quads if q.get("category")],
                    polarities=[q["polarity"] for q in quads if q.get("polarity")],
                )
            )
    return records


def export_parses(manifest: Manifest) -> dict:
    records = read_dataset(manifest.dataset)
    warnings = []
    with open(manifest.parse_file, "w", encoding="utf-8") as fh:
        for i, record in enumerate(records):
            tokens = record.tokens
            if not tokens:
                fh.write(PLACEHOLDER_TREE + "\n")
                warnings.append(f"line {i + 1}: no tokens, wrote placeholder tree")
                continue
            fh.write(serialize(chunk_tree(tokens)) + "\n")
    if warnings:
        sidecar = Path(manifest.parse_file).with_suffix(".log")
        sidecar.write_text("\n".join(warnings) + "\n", encoding="utf-8")
        print(
            f"warning: {len(warnings)} placeholder trees, see {sidecar}",
            file=sys.stderr,
        )
    return {"sentences": len(records), "placeholders": len(warnings)}


def export_embeddings(manifest: Manifest) -> dict:
    records = read_dataset(manifest.dataset)
    phrases: set[str] = set()
    for record in records:
        phrases.update(record.categories)
        phrases.update(record.polarities)
        if record.offsets:
            phrases.update(
                collect_span_texts(record.text, record.offsets, manifest.max_span_len)
            )
    phrases.update({"positive", "negative", "neutral"})
    rows = write_embedding_file(manifest.embedding_file, phrases, manifest.dim)
    return {"phrases": rows, "dim": manifest.dim}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="asqp-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("export-parses", "export-embeddings", "export-all"):
        p = sub.add_parser(name)
        p.add_argument("--manifest", required=True)
    args = parser.parse_args(argv)
    manifest = load_manifest(args.manifest)
    if not Path(manifest.dataset).is_file():
        print(f"error: dataset not found: {manifest.dataset}", file=sys.stderr)
        return 2
    summary = {"manifest": asdict(manifest)}
    if args.command in ("export-parses", "export-all"):
        summary["parses"] = export_parses(manifest)
    if args.command in ("export-embeddings", "export-all"):
        summary["embeddings"] = export_embeddings(manifest)
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
