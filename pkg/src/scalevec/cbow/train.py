"""Training driver: subsampling, window draws, negatives, and worker scheduling.

Per-position randomness (keep draws, window half-widths, negatives) is
generated with numpy and handed to the selected kernel in blocks. The
learning rate decays linearly with the raw stream position across all
iterations, so it is a pure function of position and needs no shared
counter. With workers > 1 the shards run as threads updating the shared
matrices without locks (the compiled kernel releases the GIL); results
are then nondeterministic but statistically equivalent. workers=1 is the
deterministic mode: same seed, bit-identical matrices.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from ..corpus import Vocabulary, keep_prob_table
from . import backend as backend_mod
from .config import TrainConfig
from .model import Embedding, init_embedding
from .sampler import NegativeSampler
from .window import sample_windows

CHUNK = 50_000

ProgressFn = Callable[[dict], None]


class _LossTracker:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.loss_sum = 0.0
        self.steps = 0
        self.skipped = 0

    def add(self, loss: float, steps: int, skipped: int) -> None:
        with self.lock:
            self.loss_sum += loss
            self.steps += steps
            self.skipped += skipped

    def mean_loss(self) -> float:
        return self.loss_sum / self.steps if self.steps else float("nan")


def train_embedding(
    ids: np.ndarray,
    vocab: Vocabulary,
    config: TrainConfig,
    callback: ProgressFn | None = None,
    backend: str | None = None,
    corpus_fingerprint: str | None = None,
) -> Embedding:
    """Train a fresh embedding over the id stream for config.iterations passes."""
    ids = np.ascontiguousarray(ids, dtype=np.int32)
    if len(ids) == 0:
        raise ValueError("cannot train on an empty id stream")
    kernel = backend_mod.get_kernel(backend)
    embedding = init_embedding(vocab, config, np.random.default_rng([config.seed, 0]))
    if corpus_fingerprint is not None:
        embedding.meta["corpus_fingerprint"] = corpus_fingerprint
    embedding.meta["backend"] = kernel.BACKEND_NAME
    sampler = NegativeSampler(vocab)
    keep = keep_prob_table(vocab, config.subsample_t)
    if np.all(keep >= 1.0):
        keep = None  # subsampling is a no-op; skip the draws
    tracker = _LossTracker()
    for it in range(config.iterations):
        _run_iteration(ids, config, embedding, it, sampler, keep, kernel, tracker, callback)
    final = tracker.mean_loss()
    embedding.meta["final_loss"] = None if np.isnan(final) else float(final)
    return embedding


def train_epoch(
    ids: np.ndarray,
    config: TrainConfig,
    embedding: Embedding,
    iteration: int = 0,
    backend: str | None = None,
    callback: ProgressFn | None = None,
) -> Embedding:
    """One pass over the id stream, updating the embedding in place."""
    ids = np.ascontiguousarray(ids, dtype=np.int32)
    kernel = backend_mod.get_kernel(backend)
    sampler = NegativeSampler(embedding.vocab)
    keep = keep_prob_table(embedding.vocab, config.subsample_t)
    if np.all(keep >= 1.0):
        keep = None
    _run_iteration(ids, config, embedding, iteration, sampler, keep, kernel, _LossTracker(), callback)
    return embedding


def _run_iteration(ids, config, embedding, it, sampler, keep, kernel, tracker, callback):
    n = len(ids)
    bounds = np.linspace(0, n, config.workers + 1).astype(np.int64)
    args = [
        (ids, config, embedding, it, sampler, keep, kernel, tracker, callback, w, int(bounds[w]), int(bounds[w + 1]))
        for w in range(config.workers)
        if bounds[w + 1] > bounds[w]
    ]
    if len(args) <= 1:
        for a in args:
            _run_shard(*a)
    else:
        with ThreadPoolExecutor(max_workers=len(args)) as pool:
            for f in [pool.submit(_run_shard, *a) for a in args]:
                f.result()


def _run_shard(ids, config, embedding, it, sampler, keep, kernel, tracker, callback, w, s0, s1):
    rng = np.random.default_rng([config.seed, 1, it, w])
    shard = ids[s0:s1]
    if keep is not None:
        mask = rng.random(len(shard)) < keep[shard]
        surv = np.ascontiguousarray(shard[mask])
        raw_pos = np.nonzero(mask)[0]
    else:
        surv = np.ascontiguousarray(shard)
        raw_pos = None
    syn0 = embedding.input_vectors
    syn1 = embedding.output_vectors
    n_total_raw = len(ids) * config.iterations
    base_raw = it * len(ids) + s0
    pairwise = config.context_mode == "pairwise"
    for cs in range(0, len(surv), CHUNK):
        ce = min(cs + CHUNK, len(surv))
        targets = surv[cs:ce]
        bwin = sample_windows(config.beta, ce - cs, rng)
        negs = sampler.draw_avoiding(rng, targets, config.negative)
        if raw_pos is not None:
            gpos = base_raw + raw_pos[cs:ce]
        else:
            gpos = base_raw + np.arange(cs, ce, dtype=np.int64)
        alphas = np.maximum(
            config.min_alpha, config.alpha0 * (1.0 - gpos / n_total_raw)
        ).astype(np.float32)
        loss, steps, skipped = kernel.train_block(
            syn0, syn1, surv, cs, ce, bwin, np.ascontiguousarray(negs), alphas, pairwise
        )
        tracker.add(loss, steps, skipped)
        if callback is not None:
            callback(
                {
                    "iteration": it,
                    "worker": w,
                    "position": int(gpos[-1]) if len(gpos) else base_raw,
                    "total_positions": n_total_raw,
                    "alpha": float(alphas[-1]) if len(alphas) else config.min_alpha,
                    "mean_loss": tracker.mean_loss(),
                    "steps": tracker.steps,
                    "skipped": tracker.skipped,
                }
            )
