"""Shared test oracles, independent of the code paths they check."""

from __future__ import annotations

import itertools

import numpy as np


def brute_force_lp(c: np.ndarray, g: np.ndarray, h: np.ndarray) -> float | None:
    """Minimum objective over basic feasible solutions by exhaustive enumeration.

    Valid oracle for bounded feasible standard-form LPs with full-row-rank G.
    Returns None if no basic feasible solution exists.
    """
    m, n = g.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        sub = g[:, cols]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x_basic = np.linalg.solve(sub, h)
        if x_basic.min() < -1e-9:
            continue
        obj = float(c[list(cols)] @ x_basic)
        if best is None or obj < best:
            best = obj
    return best


def random_feasible_lp(rng: np.random.Generator):
    """A bounded feasible standard-form LP: c >= 0, h reachable from x0 >= 0."""
    m = int(rng.integers(1, 5))
    n = int(rng.integers(m + 1, 7))
    g = rng.standard_normal((m, n))
    x0 = np.where(rng.random(n) < 0.5, 0.0, rng.uniform(0.0, 3.0, n))
    h = g @ x0
    c = np.abs(rng.standard_normal(n))
    return c, g, h


def bernoulli_matrix(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """k x n matrix of +/-1 entries, equiprobable."""
    return rng.choice(np.array([-1.0, 1.0]), size=(k, n))
