"""Hashed character-trigram phrase encoder.

Fully offline and deterministic: each trigram of the padded, casefolded
phrase is hashed into one of `dim` signed buckets, then the vector is
L2-normalized. Not a learned embedding, but it gives stable, non-zero,
string-similarity-flavored vectors, which is all the file contract needs;
swap in a real encoder by writing the same format.
"""

from __future__ import annotations

import hashlib
import math

DEFAULT_DIM = 64


def encode_phrase(phrase: str, dim: int = DEFAULT_DIM) -> list[float]:
    padded = f"#{phrase.casefold()}#"
    vec = [0.0] * dim
    for i in range(len(padded) - 2):
        gram = padded[i : i + 3].encode("utf-8")
        digest = hashlib.sha1(gram).digest()
        bucket = int.from_bytes(digest[:4], "big") % dim
        sign = 1.0 if digest[4] & 1 else -1.0
        vec[bucket] += sign
    norm = math.sqrt(sum(v * v for v in vec))
    if norm == 0.0:
        vec[0] = 1.0
        norm = 1.0
    return [v / norm for v in vec]


def write_embedding_file(path, phrases, dim: int = DEFAULT_DIM) -> int:
    """One row per unique phrase, sorted, in the pipeline's table format."""
    unique = sorted(set(p for p in phrases if p))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim {dim}\n")
        for phrase in unique:
            values = " ".join(repr(v) for v in encode_phrase(phrase, dim))
            fh.write(f"{phrase}\t{values}\n")
    return len(unique)
