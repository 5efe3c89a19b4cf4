"""The randomized context window and its exact inclusion law."""

from __future__ import annotations

import numpy as np


def window_inclusion_prob(k: int, beta: int) -> float:
    """Probability that the word at offset k enters the context at scale beta.

    The half-width b is uniform on {1..beta}, so offset k is included iff
    b >= k, i.e. with probability max(0, 1 - (k-1)/beta).
    """
    if k < 1:
        raise ValueError(f"offset k must be >= 1, got {k}")
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    return max(0.0, 1.0 - (k - 1) / beta)


def sample_window(beta: int, rng: np.random.Generator) -> int:
    """Draw a window half-width uniformly from {1..beta}."""
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    return int(rng.integers(1, beta + 1))


def sample_windows(beta: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized sample_window: n half-widths as int32."""
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    return rng.integers(1, beta + 1, size=n, dtype=np.int32)
