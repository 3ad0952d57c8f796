"""Phrase embedding storage and cosine-similarity top-k selection.

The embedding file format is line-oriented: a "dim <d>" header, then one
"<phrase>\\t<v1> <v2> ... <vd>" row per phrase, UTF-8.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class EmbeddingFormatError(ValueError):
    pass


class PhraseLookupError(LookupError):
    def __init__(self, phrase: str):
        super().__init__(f"no embedding for phrase {phrase!r}")
        self.phrase = phrase


class EmbeddingTable:
    """Read-only map from phrase to a fixed-dimension dense vector."""

    def __init__(self, dimension: int, entries: dict[str, Sequence[float]]):
        if dimension < 1:
            raise EmbeddingFormatError("dimension must be positive")
        self.dimension = dimension
        self._vectors: dict[str, np.ndarray] = {}
        for phrase, values in entries.items():
            vec = np.asarray(values, dtype=np.float64)
            if vec.shape != (dimension,):
                raise EmbeddingFormatError(
                    f"phrase {phrase!r}: expected {dimension} values, got {vec.shape}"
                )
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError(f"phrase {phrase!r}: non-finite values")
            if float(np.linalg.norm(vec)) == 0.0:
                raise EmbeddingFormatError(f"phrase {phrase!r}: zero vector")
            self._vectors[phrase] = vec

    def __contains__(self, phrase: str) -> bool:
        return phrase in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def vector(self, phrase: str) -> np.ndarray:
        try:
            return self._vectors[phrase]
        except KeyError:
            raise PhraseLookupError(phrase) from None

    def phrases(self) -> tuple[str, ...]:
        return tuple(self._vectors)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 2 or parts[0] != "dim" or not parts[1].isdigit():
            raise EmbeddingFormatError(
                f"first line must be 'dim <d>', got {header!r}"
            )
        dim = int(parts[1])
        entries: dict[str, list[float]] = {}
        for line_no, line in enumerate(fh, 2):
            if not line.strip():
                continue
            if "\t" not in line:
                raise EmbeddingFormatError(
                    f"line {line_no}: missing tab between phrase and values"
                )
            phrase, _, value_part = line.rstrip("\n").partition("\t")
            if phrase in entries:
                raise EmbeddingFormatError(
                    f"line {line_no}: duplicate phrase {phrase!r}"
                )
            try:
                values = [float(v) for v in value_part.split()]
            except ValueError as exc:
                raise EmbeddingFormatError(f"line {line_no} ({phrase!r}): {exc}")
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"line {line_no}: phrase {phrase!r} has {len(values)} values, "
                    f"expected {dim}"
                )
            entries[phrase] = values
    return EmbeddingTable(dim, entries)


def write_embeddings(path: str | Path, table: EmbeddingTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim {table.dimension}\n")
        for phrase in table.phrases():
            values = " ".join(repr(float(v)) for v in table.vector(phrase))
            fh.write(f"{phrase}\t{values}\n")


def cosine(table: EmbeddingTable, a: str, b: str) -> float:
    va = table.vector(a)
    vb = table.vector(b)
    return float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))


def top_k_similar(
    table: EmbeddingTable,
    query: str,
    pool: Iterable[str],
    k: int,
    exclude: Iterable[str] = (),
) -> list[tuple[str, float]]:
    """The k pool phrases most cosine-similar to `query`.

    Pool members without an embedding are skipped with a warning rather than
    aborting; ties break lexicographically so output is deterministic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    query_vec = table.vector(query)
    query_norm = np.linalg.norm(query_vec)
    excluded = set(exclude)
    seen: set[str] = set()
    scored: list[tuple[str, float]] = []
    missing: list[str] = []
    for phrase in pool:
        if phrase in excluded or phrase in seen:
            continue
        seen.add(phrase)
        if phrase not in table:
            missing.append(phrase)
            continue
        vec = table.vector(phrase)
        sim = float(np.dot(query_vec, vec) / (query_norm * np.linalg.norm(vec)))
        scored.append((phrase, sim))
    if missing:
        logger.warning(
            "top_k_similar(%r): skipped %d pool phrases without embeddings: %s",
            query,
            len(missing),
            ", ".join(missing[:5]) + ("..." if len(missing) > 5 else ""),
        )
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]
