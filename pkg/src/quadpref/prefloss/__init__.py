"""Preference-loss kernels over candidate log-probabilities.

Four losses share one batch layout (gold candidate at index 0):

* ce:        plain negative log-likelihood of the gold candidate
* pairwise:  sigmoid preference of gold over a single negative
* listwise:  softmax over implicit rewards of the full candidate set
* hybrid:    (1 - lambda) * listwise + lambda * ce

A compiled extension provides the hot path; a pure-Python implementation is
selected automatically when the extension is unavailable (or when
QUADPREF_PURE=1 is set). Both backends produce identical results.
"""

from __future__ import annotations

import os

import numpy as np

from .batch import (
    BatchError,
    LossBatch,
    LossResult,
    finite_difference_gradient,
    gradient_max_rel_error,
    mean_loss,
    pairwise_sum,
)

_FORCE_PURE = os.environ.get("QUADPREF_PURE", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _core as _backend

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _backend

        BACKEND = "pure"
else:
    from . import _pure as _backend

    BACKEND = "pure"


def implicit_rewards(batch: LossBatch) -> np.ndarray:
    """Scaled log-ratio of policy to reference, per candidate."""
    return np.asarray(
        _backend.implicit_rewards(batch.policy_logp, batch.ref_logp, batch.beta),
        dtype=np.float64,
    )


def listwise_distribution(rewards) -> np.ndarray:
    """Overflow-safe softmax over implicit rewards."""
    rewards = np.asarray(rewards, dtype=np.float64)
    if not np.all(np.isfinite(rewards)):
        raise BatchError("non-finite input")
    return np.asarray(_backend.listwise_distribution(rewards), dtype=np.float64)


def _wrap(raw) -> LossResult:
    value, grad, rewards, probs = raw
    return LossResult(
        value=float(value),
        gradient=np.asarray(grad, dtype=np.float64),
        rewards=np.asarray(rewards, dtype=np.float64),
        probs=np.asarray(probs, dtype=np.float64),
    )


def loss_ce(batch: LossBatch) -> LossResult:
    return _wrap(_backend.loss_ce(batch.policy_logp, batch.ref_logp, batch.beta))


def loss_dpo_pairwise(batch: LossBatch) -> LossResult:
    if batch.size != 2:
        raise BatchError(
            f"pairwise loss needs exactly two candidates, got {batch.size}"
        )
    return _wrap(
        _backend.loss_dpo_pairwise(batch.policy_logp, batch.ref_logp, batch.beta)
    )


def loss_listwise(batch: LossBatch) -> LossResult:
    return _wrap(
        _backend.loss_listwise(batch.policy_logp, batch.ref_logp, batch.beta)
    )


def loss_hybrid(batch: LossBatch) -> LossResult:
    return _wrap(
        _backend.loss_hybrid(
            batch.policy_logp, batch.ref_logp, batch.beta, batch.lam
        )
    )


KERNELS = {
    "ce": loss_ce,
    "pairwise": loss_dpo_pairwise,
    "listwise": loss_listwise,
    "hybrid": loss_hybrid,
}

__all__ = [
    "BACKEND",
    "BatchError",
    "KERNELS",
    "LossBatch",
    "LossResult",
    "finite_difference_gradient",
    "gradient_max_rel_error",
    "implicit_rewards",
    "listwise_distribution",
    "loss_ce",
    "loss_dpo_pairwise",
    "loss_hybrid",
    "loss_listwise",
    "mean_loss",
    "pairwise_sum",
]
