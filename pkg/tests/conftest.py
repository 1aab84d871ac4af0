"""Shared fixtures and independent test-side oracles."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from tokenmorph import TokenSet


def random_tokenset(rng: np.random.Generator, n: int, m: int, scale: float = 1.0) -> TokenSet:
    return TokenSet(scale * rng.normal(size=(n, m)))


def brute_force_permutation(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Independent oracle: optimal permutation by full enumeration (n <= 8)."""
    n = x.shape[0]
    cost = ((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2)
    rows = np.arange(n)
    best_perm, best_cost = None, np.inf
    for perm in itertools.permutations(range(n)):
        total = float(cost[rows, perm].sum())
        if total < best_cost:
            best_cost = total
            best_perm = np.asarray(perm)
    return best_perm, best_cost / n


def scipy_assignment_permutation(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Independent oracle: optimal permutation via scipy's LAP solver."""
    cost = ((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm


def multiset_max_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest matched Euclidean distance under the optimal pairing."""
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(d)
    return float(d[rows, cols].max())
