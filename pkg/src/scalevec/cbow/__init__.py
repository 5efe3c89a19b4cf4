"""CBOW training with negative sampling and a randomized context window.

The half-width of the context window is redrawn uniformly from {1..beta}
for every target, so the probability that the word at offset k enters the
context is max(0, 1 - (k-1)/beta). The hot training loop lives in a
compiled extension (``_kernel_c``) with a numpy fallback (``_kernel_py``)
selected at import time; see ``backend``.
"""

from .config import TrainConfig
from .model import Embedding, init_embedding, score, softmax_posterior
from .sampler import NegativeSampler
from .train import train_embedding
from .window import sample_window, window_inclusion_prob

__all__ = [
    "TrainConfig",
    "Embedding",
    "init_embedding",
    "score",
    "softmax_posterior",
    "NegativeSampler",
    "train_embedding",
    "sample_window",
    "window_inclusion_prob",
]
