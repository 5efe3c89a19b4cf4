"""Training configuration."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace


@dataclass
class TrainConfig:
    """All hyperparameters of one training run.

    Defaults mirror the classic CBOW setup this laboratory studies:
    200-dimensional vectors, 25 negative samples, subsampling threshold
    1e-4, 30 iterations, 16 workers. ``beta`` (the maximal window
    half-width) has no default and must be chosen per run.
    """

    beta: int
    dim: int = 200
    negative: int = 25
    subsample_t: float = 1e-4
    iterations: int = 30
    workers: int = 16
    alpha0: float = 0.05
    min_alpha_fraction: float = 1e-4
    seed: int = 1
    context_mode: str = "averaged"  # averaged | pairwise

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.negative < 0:
            raise ValueError(f"negative must be >= 0, got {self.negative}")
        if self.subsample_t <= 0:
            raise ValueError("subsample_t must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if not (0 < self.min_alpha_fraction <= 1):
            raise ValueError("min_alpha_fraction must be in (0, 1]")
        if self.context_mode not in ("averaged", "pairwise"):
            raise ValueError(f"context_mode must be 'averaged' or 'pairwise', got {self.context_mode!r}")

    @property
    def min_alpha(self) -> float:
        return self.alpha0 * self.min_alpha_fraction

    def with_cell(self, beta: int, seed: int) -> "TrainConfig":
        """Copy of this config overridden only in beta and seed (sweep cells)."""
        return replace(self, beta=beta, seed=seed)

    def to_dict(self) -> dict:
        return asdict(self)

    def fingerprint(self) -> str:
        """Hash of every field except beta and seed; identical across sweep cells."""
        d = self.to_dict()
        d.pop("beta")
        d.pop("seed")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def field_names(cls) -> list[str]:
        return [f for f in cls.__dataclass_fields__]
