"""Loss-batch containers, finite-difference checking, and deterministic sums.

A batch holds per-candidate sequence log-probabilities under the policy and
the frozen reference, with index 0 always the gold candidate. Kernels return
the loss value, its gradient with respect to the policy log-probabilities,
and the implicit rewards / candidate distribution as diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class BatchError(ValueError):
    pass


@dataclass(frozen=True)
class LossBatch:
    policy_logp: np.ndarray
    ref_logp: np.ndarray
    beta: float
    lam: float = 0.5

    def __post_init__(self):
        policy = np.asarray(self.policy_logp, dtype=np.float64)
        ref = np.asarray(self.ref_logp, dtype=np.float64)
        object.__setattr__(self, "policy_logp", policy)
        object.__setattr__(self, "ref_logp", ref)
        if policy.ndim != 1 or ref.ndim != 1:
            raise BatchError("log-probability vectors must be one-dimensional")
        if policy.shape != ref.shape:
            raise BatchError(
                f"policy and reference lengths differ: {policy.shape} vs {ref.shape}"
            )
        if policy.shape[0] < 2:
            raise BatchError("a batch needs the gold candidate plus at least one negative")
        if not (np.all(np.isfinite(policy)) and np.all(np.isfinite(ref))):
            raise BatchError("non-finite input")
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise BatchError(f"beta must be positive, got {self.beta}")
        if not np.isfinite(self.lam) or not (0.0 <= self.lam <= 1.0):
            raise BatchError(f"lambda must lie in [0, 1], got {self.lam}")

    @property
    def size(self) -> int:
        return int(self.policy_logp.shape[0])

    def with_policy(self, policy_logp: Sequence[float]) -> "LossBatch":
        return LossBatch(
            policy_logp=np.asarray(policy_logp, dtype=np.float64),
            ref_logp=self.ref_logp,
            beta=self.beta,
            lam=self.lam,
        )

    def length_normalized(self, lengths: Sequence[int]) -> "LossBatch":
        """Optional per-token normalization; off the main path by default."""
        lens = np.asarray(lengths, dtype=np.float64)
        if lens.shape != self.policy_logp.shape or np.any(lens <= 0):
            raise BatchError("lengths must be positive and match the batch size")
        return LossBatch(
            policy_logp=self.policy_logp / lens,
            ref_logp=self.ref_logp / lens,
            beta=self.beta,
            lam=self.lam,
        )


@dataclass(frozen=True)
class LossResult:
    value: float
    gradient: np.ndarray
    rewards: np.ndarray
    probs: np.ndarray


def finite_difference_gradient(
    loss_value: Callable[[LossBatch], float], batch: LossBatch, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient of a loss wrt the policy log-probs."""
    base = batch.policy_logp
    grad = np.empty_like(base)
    for i in range(base.shape[0]):
        plus = base.copy()
        minus = base.copy()
        plus[i] += h
        minus[i] -= h
        grad[i] = (
            loss_value(batch.with_policy(plus)) - loss_value(batch.with_policy(minus))
        ) / (2.0 * h)
    return grad


def gradient_max_rel_error(
    kernel: Callable[[LossBatch], LossResult], batch: LossBatch, h: float = 1e-5
) -> float:
    """Max per-coordinate relative error, analytic vs central differences.

    The denominator is floored at 1 so near-zero coordinates compare
    absolutely instead of blowing up.
    """
    analytic = kernel(batch).gradient
    numeric = finite_difference_gradient(lambda b: kernel(b).value, batch, h)
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))


def pairwise_sum(values: Sequence[float]) -> float:
    """Tree-shaped summation: deterministic regardless of chunk scheduling."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def mean_loss(
    kernel: Callable[[LossBatch], LossResult], batches: Sequence[LossBatch]
) -> float:
    """Plain arithmetic mean of per-batch losses via pairwise summation."""
    if not batches:
        raise BatchError("mean over an empty batch list")
    return pairwise_sum([kernel(b).value for b in batches]) / len(batches)
