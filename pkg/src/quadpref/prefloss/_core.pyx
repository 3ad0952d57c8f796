# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled loss kernels; mirrors _pure with C loops over float64 buffers."""

from libc.math cimport exp, log, log1p

import numpy as np


cdef inline double _softplus(double z) nogil:
    if z > 0.0:
        return z + log1p(exp(-z))
    return log1p(exp(z))


cdef inline double _sigmoid(double z) nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef void _rewards(const double[::1] policy, const double[::1] ref,
                   double beta, double[::1] out) nogil:
    cdef Py_ssize_t i
    for i in range(policy.shape[0]):
        out[i] = beta * (policy[i] - ref[i])


cdef double _softmax(const double[::1] s, double[::1] out) nogil:
    """Fills out with softmax(s); returns m + log(sum exp(s - m))."""
    cdef Py_ssize_t i, n = s.shape[0]
    cdef double m = s[0]
    cdef double total = 0.0
    for i in range(1, n):
        if s[i] > m:
            m = s[i]
    for i in range(n):
        out[i] = exp(s[i] - m)
        total += out[i]
    for i in range(n):
        out[i] /= total
    return m + log(total)


def implicit_rewards(policy, ref, double beta):
    cdef double[::1] p = np.ascontiguousarray(policy, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(ref, dtype=np.float64)
    out = np.empty(p.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    _rewards(p, r, beta, o)
    return out


def listwise_distribution(rewards):
    cdef double[::1] s = np.ascontiguousarray(rewards, dtype=np.float64)
    out = np.empty(s.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    _softmax(s, o)
    return out


def loss_ce(policy, ref, double beta):
    cdef double[::1] p = np.ascontiguousarray(policy, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(ref, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    rewards = np.empty(n, dtype=np.float64)
    probs = np.empty(n, dtype=np.float64)
    grad = np.zeros(n, dtype=np.float64)
    cdef double[::1] s = rewards
    cdef double[::1] q = probs
    _rewards(p, r, beta, s)
    _softmax(s, q)
    grad[0] = -1.0
    return -p[0], grad, rewards, probs


def loss_dpo_pairwise(policy, ref, double beta):
    cdef double[::1] p = np.ascontiguousarray(policy, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(ref, dtype=np.float64)
    if p.shape[0] != 2:
        raise ValueError("pairwise loss needs exactly two candidates")
    rewards = np.empty(2, dtype=np.float64)
    probs = np.empty(2, dtype=np.float64)
    grad = np.empty(2, dtype=np.float64)
    cdef double[::1] s = rewards
    cdef double[::1] q = probs
    _rewards(p, r, beta, s)
    _softmax(s, q)
    cdef double d = s[0] - s[1]
    cdef double slope = _sigmoid(-d)
    grad[0] = -beta * slope
    grad[1] = beta * slope
    return _softplus(-d), grad, rewards, probs


def loss_listwise(policy, ref, double beta):
    cdef double[::1] p = np.ascontiguousarray(policy, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(ref, dtype=np.float64)
    cdef Py_ssize_t i, n = p.shape[0]
    rewards = np.empty(n, dtype=np.float64)
    probs = np.empty(n, dtype=np.float64)
    grad = np.empty(n, dtype=np.float64)
    cdef double[::1] s = rewards
    cdef double[::1] q = probs
    cdef double[::1] g = grad
    _rewards(p, r, beta, s)
    cdef double logz = _softmax(s, q)
    for i in range(n):
        g[i] = beta * q[i]
    g[0] -= beta
    return -(s[0] - logz), grad, rewards, probs


def loss_hybrid(policy, ref, double beta, double lam):
    cdef double[::1] p = np.ascontiguousarray(policy, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(ref, dtype=np.float64)
    cdef Py_ssize_t i, n = p.shape[0]
    rewards = np.empty(n, dtype=np.float64)
    probs = np.empty(n, dtype=np.float64)
    grad = np.empty(n, dtype=np.float64)
    cdef double[::1] s = rewards
    cdef double[::1] q = probs
    cdef double[::1] g = grad
    _rewards(p, r, beta, s)
    cdef double logz = _softmax(s, q)
    cdef double lw_value = -(s[0] - logz)
    cdef double lw_g
    for i in range(n):
        lw_g = beta * q[i]
        if i == 0:
            lw_g -= beta
        g[i] = (1.0 - lam) * lw_g
    g[0] -= lam
    return (1.0 - lam) * lw_value + lam * (-p[0]), grad, rewards, probs
