"""Numeric hot kernels: batch entropy, batch majority vote, Pareto dominance.

Each kernel has a pure-numpy implementation and a numba @njit twin. The
active backend is picked at import time: numba when importable, unless the
environment variable ANNOSPLIT_NUMBA is set to 0/false/off (or numba is
missing), in which case the numpy path runs. benchmarks/bench_kernels.py
compares the two.

Contracts (shared by both backends):
  - counts: float64 array (m, L), each row a per-class occurrence vector
    with row sum >= 1.
  - entropy uses the natural log with 0 * ln 0 == 0.
  - dominance: point i is inefficient iff some j has cost_j <= cost_i and
    quality_j >= quality_i with at least one strict.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("ANNOSPLIT_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

try:  # numba is an optional accelerator, never a hard requirement at runtime
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def deco(f):
            return f

        return deco


def entropy_from_counts_numpy(counts: np.ndarray) -> np.ndarray:
    """Shannon entropy (nats) of each row's empirical distribution."""
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=1, keepdims=True)
    p = counts / totals
    terms = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return -terms.sum(axis=1)


@njit(cache=True)
def entropy_from_counts_jit(counts: np.ndarray) -> np.ndarray:
    m, L = counts.shape
    out = np.empty(m, dtype=np.float64)
    for i in range(m):
        total = 0.0
        for j in range(L):
            total += counts[i, j]
        h = 0.0
        for j in range(L):
            c = counts[i, j]
            if c > 0.0:
                p = c / total
                h -= p * np.log(p)
        out[i] = h
    return out


def majority_from_counts_numpy(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per row: index of the strictly most frequent class, and a tie flag.

    On a tie the returned index is the first argmax; callers must treat the
    row as unresolved when tied is True.
    """
    counts = np.asarray(counts, dtype=np.float64)
    winners = counts.argmax(axis=1).astype(np.int64)
    top = counts.max(axis=1)
    tied = (counts == top[:, None]).sum(axis=1) > 1
    return winners, tied


@njit(cache=True)
def majority_from_counts_jit(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m, L = counts.shape
    winners = np.empty(m, dtype=np.int64)
    tied = np.empty(m, dtype=np.bool_)
    for i in range(m):
        best = 0
        best_c = counts[i, 0]
        n_at_best = 1
        for j in range(1, L):
            c = counts[i, j]
            if c > best_c:
                best = j
                best_c = c
                n_at_best = 1
            elif c == best_c:
                n_at_best += 1
        winners[i] = best
        tied[i] = n_at_best > 1
    return winners, tied


def dominance_flags_numpy(costs: np.ndarray, qualities: np.ndarray) -> np.ndarray:
    """efficient[i] == True iff no other point dominates point i."""
    c = np.asarray(costs, dtype=np.float64)
    q = np.asarray(qualities, dtype=np.float64)
    cheaper_eq = c[None, :] <= c[:, None]  # [i, j]: j costs no more than i
    better_eq = q[None, :] >= q[:, None]
    strict = (c[None, :] < c[:, None]) | (q[None, :] > q[:, None])
    dominated = (cheaper_eq & better_eq & strict).any(axis=1)
    return ~dominated


@njit(cache=True)
def dominance_flags_jit(costs: np.ndarray, qualities: np.ndarray) -> np.ndarray:
    n = costs.shape[0]
    efficient = np.ones(n, dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            if costs[j] <= costs[i] and qualities[j] >= qualities[i] and (
                costs[j] < costs[i] or qualities[j] > qualities[i]
            ):
                efficient[i] = False
                break
    return efficient


HAVE_NUMBA = _HAVE_NUMBA
USING_NUMBA = _WANT_NUMBA and _HAVE_NUMBA

if USING_NUMBA:
    entropy_from_counts = entropy_from_counts_jit
    majority_from_counts = majority_from_counts_jit
    dominance_flags = dominance_flags_jit
else:
    entropy_from_counts = entropy_from_counts_numpy
    majority_from_counts = majority_from_counts_numpy
    dominance_flags = dominance_flags_numpy


def backend() -> str:
    return "numba" if USING_NUMBA else "numpy"


def warmup() -> None:
    """Trigger jit compilation on tiny inputs so later calls are pure compute."""
    counts = np.array([[2.0, 1.0], [1.0, 1.0]])
    entropy_from_counts(counts)
    majority_from_counts(counts)
    dominance_flags(np.array([1.0, 2.0]), np.array([0.5, 0.6]))
