"""Pure-Python reference kernels.

Scalar loops written for auditability; the compiled extension mirrors these
bit-for-bit where the operation order allows. All math is 64-bit.
"""

from __future__ import annotations

import math
from typing import Sequence


def _softplus(z: float) -> float:
    # log(1 + e^z) without overflow for large |z|.
    if z > 0.0:
        return z + math.log1p(math.exp(-z))
    return math.log1p(math.exp(z))


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def implicit_rewards(
    policy: Sequence[float], ref: Sequence[float], beta: float
) -> list[float]:
    return [beta * (p - r) for p, r in zip(policy, ref)]


def listwise_distribution(rewards: Sequence[float]) -> list[float]:
    m = max(rewards)
    exps = [math.exp(s - m) for s in rewards]
    total = sum(exps)
    return [e / total for e in exps]


def _diagnostics(policy, ref, beta):
    s = implicit_rewards(policy, ref, beta)
    return s, listwise_distribution(s)


def loss_ce(policy, ref, beta):
    s, probs = _diagnostics(policy, ref, beta)
    grad = [0.0] * len(policy)
    grad[0] = -1.0
    return -policy[0], grad, s, probs


def loss_dpo_pairwise(policy, ref, beta):
    if len(policy) != 2:
        raise ValueError("pairwise loss needs exactly two candidates")
    s, probs = _diagnostics(policy, ref, beta)
    d = s[0] - s[1]
    value = _softplus(-d)
    slope = _sigmoid(-d)
    grad = [-beta * slope, beta * slope]
    return value, grad, s, probs


def loss_listwise(policy, ref, beta):
    s, probs = _diagnostics(policy, ref, beta)
    m = max(s)
    total = sum(math.exp(v - m) for v in s)
    logz = m + math.log(total)
    value = -(s[0] - logz)
    grad = [beta * p for p in probs]
    grad[0] -= beta
    return value, grad, s, probs


def loss_hybrid(policy, ref, beta, lam):
    lw_value, lw_grad, s, probs = loss_listwise(policy, ref, beta)
    value = (1.0 - lam) * lw_value + lam * (-policy[0])
    grad = [(1.0 - lam) * g for g in lw_grad]
    grad[0] -= lam
    return value, grad, s, probs
