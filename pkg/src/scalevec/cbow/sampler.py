"""Negative sampling distribution over the vocabulary."""

from __future__ import annotations

import numpy as np

from ..corpus import Vocabulary


class NegativeSampler:
    """Draws word ids with probability proportional to count**power.

    power defaults to 0.75, the standard smoothing of the unigram
    distribution. Every retained word has nonzero probability.
    """

    def __init__(self, vocab: Vocabulary, power: float = 0.75):
        weights = vocab.counts.astype(np.float64) ** power
        self._cum = np.cumsum(weights)
        self._total = float(self._cum[-1])
        self.power = power

    @property
    def probs(self) -> np.ndarray:
        w = np.diff(self._cum, prepend=0.0)
        return w / self._total

    def draw(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
        """Draw ids (int32) from the smoothed unigram distribution."""
        u = rng.random(size) * self._total
        return np.searchsorted(self._cum, u, side="right").astype(np.int32)

    def draw_avoiding(
        self, rng: np.random.Generator, targets: np.ndarray, n: int
    ) -> np.ndarray:
        """Draw an (m, n) block of negatives, resampling draws equal to each row's target."""
        m = len(targets)
        negs = self.draw(rng, (m, n))
        if n == 0 or self._cum.size == 1:
            return negs
        bad = negs == targets[:, None]
        while bad.any():
            negs[bad] = self.draw(rng, int(bad.sum()))
            bad = negs == targets[:, None]
        return negs
