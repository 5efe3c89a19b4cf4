"""Embedding container, initialization, and forward scoring."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..corpus import Vocabulary
from .config import TrainConfig


@dataclass
class Embedding:
    """Input and output vector matrices plus provenance metadata.

    ``input_vectors`` (the v representations) are the published embedding;
    ``output_vectors`` (v') are the output-side weights kept for resumed
    training and diagnostics.
    """

    vocab: Vocabulary
    input_vectors: np.ndarray  # (V, N)
    output_vectors: np.ndarray | None  # (V, N) or None if not persisted
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def validate(self) -> None:
        v = len(self.vocab)
        if self.input_vectors.shape[0] != v:
            raise ValueError(
                f"input matrix has {self.input_vectors.shape[0]} rows for vocab size {v}"
            )
        if not np.all(np.isfinite(self.input_vectors)):
            raise ValueError("input vectors contain non-finite entries")
        if self.output_vectors is not None:
            if self.output_vectors.shape != self.input_vectors.shape:
                raise ValueError("input/output matrix shapes differ")
            if not np.all(np.isfinite(self.output_vectors)):
                raise ValueError("output vectors contain non-finite entries")

    def vector(self, word: str) -> np.ndarray:
        return self.input_vectors[self.vocab.id_of(word)]


def init_embedding(
    vocab: Vocabulary, config: TrainConfig, rng: np.random.Generator
) -> Embedding:
    """Uniform input vectors on [-0.5/N, 0.5/N); zero output vectors."""
    v, n = len(vocab), config.dim
    syn0 = (rng.random((v, n), dtype=np.float32) - 0.5) / n
    syn1 = np.zeros((v, n), dtype=np.float32)
    meta = {
        "beta": config.beta,
        "seed": config.seed,
        "iterations": config.iterations,
        "dim": config.dim,
        "config_fingerprint": config.fingerprint(),
        "vocab_fingerprint": vocab.fingerprint(),
    }
    return Embedding(vocab=vocab, input_vectors=syn0, output_vectors=syn1, meta=meta)


def score(embedding: Embedding, h: np.ndarray, k: int) -> float:
    """Raw score u_k: dot product of word k's output vector with the hidden layer h."""
    if embedding.output_vectors is None:
        raise ValueError("embedding has no output vectors")
    if not (0 <= k < len(embedding.vocab)):
        raise IndexError(f"word id {k} out of range for vocab size {len(embedding.vocab)}")
    return float(np.dot(embedding.output_vectors[k], h))


def softmax_posterior(embedding: Embedding, h: np.ndarray) -> np.ndarray:
    """Posterior over the whole vocabulary from the scores, max-shifted for stability.

    Diagnostic only; training uses negative sampling.
    """
    if embedding.output_vectors is None:
        raise ValueError("embedding has no output vectors")
    u = embedding.output_vectors @ np.asarray(h, dtype=np.float64)
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite score in softmax_posterior")
    e = np.exp(u - u.max())
    return e / e.sum()
