"""Exact-match quad scoring and the fine-grained error taxonomy.

A predicted quad counts only when all four elements match the gold quad.
Unmatched quads are then aligned greedily by element agreement and sorted
into single-element errors (with partial-match vs mismatch subtypes for
span elements), multi-element errors, missing golds, and spurious
predictions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .corpus import Implicit, SurfaceQuad

SINGLE_ELEMENT = "single-element"
MULTI_ELEMENT = "multi-element"
MISSING_QUAD = "missing-quad"
SPURIOUS_QUAD = "spurious-quad"

PARTIAL_MATCH = "partial-match"
MISMATCH = "mismatch"

_ELEMENTS = ("aspect", "opinion", "category", "polarity")


class CorpusKeyError(KeyError):
    def __init__(self, missing_in_pred: list[str], missing_in_gold: list[str]):
        parts = []
        if missing_in_pred:
            parts.append(f"keys only in gold: {missing_in_pred}")
        if missing_in_gold:
            parts.append(f"keys only in predictions: {missing_in_gold}")
        super().__init__("; ".join(parts))
        self.missing_in_pred = missing_in_pred
        self.missing_in_gold = missing_in_gold


@dataclass(frozen=True)
class QuadMatchReport:
    tp: int
    pred_count: int
    gold_count: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, pred_count: int, gold_count: int) -> "QuadMatchReport":
        precision = tp / pred_count if pred_count else 0.0
        recall = tp / gold_count if gold_count else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        return cls(tp, pred_count, gold_count, precision, recall, f1)


def _norm(text: str) -> str:
    return " ".join(text.lower().split())


def _element_key(value: Union[str, Implicit], normalize: bool):
    if isinstance(value, Implicit):
        return None
    return _norm(value) if normalize else value


def quad_key(quad: SurfaceQuad, normalize: bool = True) -> tuple:
    return (
        _element_key(quad.aspect, normalize),
        _element_key(quad.opinion, normalize),
        _element_key(quad.category, normalize),
        _element_key(quad.polarity, normalize),
    )


def score(
    pred: Mapping[str, Iterable[SurfaceQuad]],
    gold: Mapping[str, Iterable[SurfaceQuad]],
    normalize: bool = True,
) -> QuadMatchReport:
    """Micro-averaged exact-match P/R/F1 over aligned sentence keys."""
    pred_keys = set(pred)
    gold_keys = set(gold)
    if pred_keys != gold_keys:
        raise CorpusKeyError(
            sorted(gold_keys - pred_keys), sorted(pred_keys - gold_keys)
        )
    tp = pred_count = gold_count = 0
    for key in gold:
        pset = {quad_key(q, normalize) for q in pred[key]}
        gset = {quad_key(q, normalize) for q in gold[key]}
        tp += len(pset & gset)
        pred_count += len(pset)
        gold_count += len(gset)
    return QuadMatchReport.from_counts(tp, pred_count, gold_count)


@dataclass(frozen=True)
class ErrorRecord:
    kind: str
    element: str | None = None
    subtype: str | None = None
    pred: SurfaceQuad | None = None
    gold: SurfaceQuad | None = None


def _word_overlap(a: Union[str, Implicit], b: Union[str, Implicit]) -> int:
    if isinstance(a, Implicit) or isinstance(b, Implicit):
        return 0
    wa = Counter(_norm(a).split())
    wb = Counter(_norm(b).split())
    return sum((wa & wb).values())


def classify_errors(
    pred: Sequence[SurfaceQuad],
    gold: Sequence[SurfaceQuad],
    normalize: bool = True,
) -> list[ErrorRecord]:
    """Error taxonomy for one sentence's predicted vs gold quad sets.

    Unmatched quads are aligned greedily by (shared elements, aspect word
    overlap, corpus order); pairs sharing nothing stay unaligned and surface
    as spurious/missing instead.
    """
    pred_items = _dedup(pred, normalize)
    gold_items = _dedup(gold, normalize)

    gold_left = list(gold_items)
    matched_pred = []
    for p in pred_items:
        pk = quad_key(p, normalize)
        hit = next((g for g in gold_left if quad_key(g, normalize) == pk), None)
        if hit is not None:
            gold_left.remove(hit)
        else:
            matched_pred.append(p)
    pred_left = matched_pred

    records: list[ErrorRecord] = []
    while pred_left and gold_left:
        best = None
        for pi, p in enumerate(pred_left):
            for gi, g in enumerate(gold_left):
                agree = _agreement(p, g, normalize)
                if agree == 0:
                    continue
                rank = (agree, _word_overlap(p.aspect, g.aspect))
                if best is None or rank > best[0]:
                    best = (rank, pi, gi)
        if best is None:
            break
        (agree, _), pi, gi = best
        p = pred_left.pop(pi)
        g = gold_left.pop(gi)
        if agree == 3:
            element = next(
                e
                for e in _ELEMENTS
                if _element_key(getattr(p, e), normalize)
                != _element_key(getattr(g, e), normalize)
            )
            if element in ("aspect", "opinion") and _word_overlap(
                getattr(p, element), getattr(g, element)
            ):
                subtype = PARTIAL_MATCH
            else:
                subtype = MISMATCH
            records.append(
                ErrorRecord(SINGLE_ELEMENT, element=element, subtype=subtype, pred=p, gold=g)
            )
        else:
            records.append(ErrorRecord(MULTI_ELEMENT, pred=p, gold=g))
    records.extend(ErrorRecord(SPURIOUS_QUAD, pred=p) for p in pred_left)
    records.extend(ErrorRecord(MISSING_QUAD, gold=g) for g in gold_left)
    return records


def _dedup(quads: Sequence[SurfaceQuad], normalize: bool) -> list[SurfaceQuad]:
    seen = set()
    out = []
    for q in quads:
        key = quad_key(q, normalize)
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


def _agreement(p: SurfaceQuad, g: SurfaceQuad, normalize: bool) -> int:
    return sum(
        _element_key(getattr(p, e), normalize) == _element_key(getattr(g, e), normalize)
        for e in _ELEMENTS
    )


def error_histogram(records: Iterable[ErrorRecord]) -> dict[str, int]:
    hist: Counter[str] = Counter()
    for rec in records:
        if rec.kind == SINGLE_ELEMENT:
            hist[f"{rec.kind}/{rec.element}/{rec.subtype}"] += 1
        else:
            hist[rec.kind] += 1
    return dict(sorted(hist.items()))


def coherence_rate(flags: Iterable[bool]) -> float:
    """Fraction of parsed groups with consistent rationales; 1.0 when empty."""
    flags = list(flags)
    if not flags:
        return 1.0
    return sum(1 for f in flags if f) / len(flags)
