"""Throughput comparison of the compiled and pure-python training kernels.

Usage: python3 benchmarks/bench_backends.py [--tokens N] [--dim N] [--beta N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from scalevec.cbow import TrainConfig, train_embedding
from scalevec.cbow.backend import HAVE_COMPILED
from scalevec.corpus import Vocabulary


def make_corpus(n_tokens: int, v: int, seed: int):
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, v + 1)
    weights /= weights.sum()
    ids = rng.choice(v, size=n_tokens, p=weights).astype(np.int32)
    counts = np.bincount(ids, minlength=v).astype(np.int64)
    order = np.argsort(-counts, kind="stable")
    order = order[counts[order] > 0]  # drop unseen words
    remap = np.empty(v, dtype=np.int32)
    remap[order] = np.arange(len(order), dtype=np.int32)
    ids = remap[ids]
    words = [f"w{i}" for i in order]
    return ids, Vocabulary(
        words=words,
        counts=counts[order],
        index={w: i for i, w in enumerate(words)},
        total_tokens=n_tokens,
    )


def bench(backend: str, ids, vocab, cfg) -> tuple[float, float]:
    t0 = time.perf_counter()
    emb = train_embedding(ids, vocab, cfg, backend=backend)
    elapsed = time.perf_counter() - t0
    steps = cfg.iterations * len(ids)
    assert emb.meta["backend"] == backend
    return elapsed, steps / elapsed


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tokens", type=int, default=200_000)
    ap.add_argument("--vocab", type=int, default=2_000)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--beta", type=int, default=5)
    ap.add_argument("--negative", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=1)
    args = ap.parse_args()

    ids, vocab = make_corpus(args.tokens, args.vocab, seed=1)
    cfg = TrainConfig(
        beta=args.beta,
        dim=args.dim,
        negative=args.negative,
        subsample_t=1e-3,
        iterations=args.iterations,
        workers=1,
        seed=7,
    )
    print(
        f"corpus: {args.tokens:,} tokens, vocab {args.vocab:,} | "
        f"dim {args.dim}, beta {args.beta}, negative {args.negative}"
    )
    results = {}
    backends = ["python"] + (["cython"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("compiled kernel not built; benchmarking the fallback only")
    for name in backends:
        elapsed, rate = bench(name, ids, vocab, cfg)
        results[name] = rate
        print(f"  {name:>7}: {elapsed:7.2f} s  ({rate:,.0f} target steps/s)")
    if len(results) == 2:
        print(f"  speedup: {results['cython'] / results['python']:.1f}x")


if __name__ == "__main__":
    main()
