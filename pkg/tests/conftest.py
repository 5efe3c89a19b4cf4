import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scalevec.cbow.config import TrainConfig
from scalevec.cbow.model import Embedding
from scalevec.corpus import Vocabulary, build_vocab, encode
from scalevec.sweep import SweepPlan, run_sweep

DATA = Path(__file__).parent / "data"


def make_vocab(words, counts=None):
    if counts is None:
        counts = list(range(len(words), 0, -1))
    arr = np.array(counts, dtype=np.int64)
    return Vocabulary(
        words=list(words),
        counts=arr,
        index={w: i for i, w in enumerate(words)},
        total_tokens=int(arr.sum()),
    )


def make_embedding(words, vectors, out_vectors=None, meta=None):
    vecs = np.asarray(vectors, dtype=np.float32)
    return Embedding(
        vocab=make_vocab(words),
        input_vectors=vecs,
        output_vectors=np.asarray(out_vectors, dtype=np.float32) if out_vectors is not None else np.zeros_like(vecs),
        meta=meta or {"beta": 1, "seed": 0},
    )


def random_embedding(rng, v, n, words=None):
    words = words or [f"w{i}" for i in range(v)]
    return make_embedding(
        words, rng.standard_normal((v, n)), rng.standard_normal((v, n))
    )


@pytest.fixture(scope="session")
def tiny_corpus():
    """Small synthetic word stream with a skewed frequency profile."""
    rng = np.random.default_rng(99)
    words = [f"w{i:02d}" for i in range(30)]
    weights = 1.0 / np.arange(1, 31)
    weights /= weights.sum()
    toks = [words[i] for i in rng.choice(30, size=20_000, p=weights)]
    vocab = build_vocab(toks, min_count=1)
    ids = encode(toks, vocab)
    return vocab, ids


@pytest.fixture(scope="session")
def tiny_sweep(tmp_path_factory, tiny_corpus):
    """A real (tiny) trained sweep: scales [1, 2, 4], 2 replicas."""
    vocab, ids = tiny_corpus
    out = tmp_path_factory.mktemp("tiny_sweep")
    cfg = TrainConfig(
        beta=1, dim=12, negative=4, subsample_t=1.0, iterations=2, workers=1, seed=5
    )
    plan = SweepPlan(scales=[1, 2, 4], replicas=2, base_config=cfg, out_dir=out)
    return run_sweep(plan, ids, vocab)


# One-line verdicts collected by tests/test_acceptance.py, echoed after the
# normal pytest summary so a full run ends with a readable scorecard.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
