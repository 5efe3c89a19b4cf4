"""Scale-grid sweep orchestration: replicas, deterministic seeds, resume, manifests."""

from __future__ import annotations

import hashlib
import json
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .cbow.config import TrainConfig
from .cbow.model import Embedding
from .cbow.train import train_embedding
from .corpus import Vocabulary
from .embio import load_embedding, save_embedding

MANIFEST_NAME = "sweep_manifest.json"


class SweepError(RuntimeError):
    pass


@dataclass
class SweepPlan:
    scales: list[int]
    replicas: int
    base_config: TrainConfig
    out_dir: Path

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)
        if not self.scales:
            raise ValueError("scales must be nonempty")
        if any(b < 1 for b in self.scales):
            raise ValueError("all scales must be >= 1")
        if any(b >= a for b, a in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")


@dataclass
class CellResult:
    beta: int
    replica: int
    seed: int
    path: str
    status: str  # done | failed | pending
    wall_time: float | None = None
    final_loss: float | None = None
    error: str | None = None


@dataclass
class SweepResult:
    """Index over the trained cells of a sweep; loads embeddings on demand."""

    out_dir: Path
    scales: list[int]
    replicas: int
    config_fingerprint: str
    cells: dict[tuple[int, int], CellResult] = field(default_factory=dict)

    def cell(self, beta: int, replica: int) -> CellResult:
        return self.cells[(beta, replica)]

    def load(self, beta: int, replica: int) -> Embedding:
        return load_embedding(self.out_dir / self.cells[(beta, replica)].path)

    def done(self, beta: int, replica: int) -> bool:
        c = self.cells.get((beta, replica))
        return c is not None and c.status == "done" and (self.out_dir / c.path).exists()

    def completed_cells(self) -> list[CellResult]:
        return [c for c in self.cells.values() if c.status == "done"]


def derive_seed(base_seed: int, beta: int, replica: int) -> int:
    """Stable injective-in-practice (beta, replica) -> 63-bit seed map."""
    blob = f"{base_seed}:{beta}:{replica}".encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little") >> 1


def cell_filename(beta: int, replica: int) -> str:
    return f"emb_b{beta:03d}_r{replica:02d}.stv"


def _write_manifest(result: SweepResult) -> None:
    doc = {
        "scales": result.scales,
        "replicas": result.replicas,
        "config_fingerprint": result.config_fingerprint,
        "cells": [
            {
                "beta": c.beta,
                "replica": c.replica,
                "seed": c.seed,
                "file": c.path,
                "status": c.status,
                "wall_time": c.wall_time,
                "final_loss": c.final_loss,
                "error": c.error,
            }
            for _, c in sorted(result.cells.items())
        ],
    }
    tmp = result.out_dir / (MANIFEST_NAME + ".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n")
    tmp.replace(result.out_dir / MANIFEST_NAME)


def load_manifest(out_dir: str | Path) -> SweepResult:
    out_dir = Path(out_dir)
    path = out_dir / MANIFEST_NAME
    if not path.exists():
        raise SweepError(f"no sweep manifest at {path}")
    doc = json.loads(path.read_text())
    result = SweepResult(
        out_dir=out_dir,
        scales=doc["scales"],
        replicas=doc["replicas"],
        config_fingerprint=doc["config_fingerprint"],
    )
    for c in doc["cells"]:
        result.cells[(c["beta"], c["replica"])] = CellResult(
            beta=c["beta"],
            replica=c["replica"],
            seed=c["seed"],
            path=c["file"],
            status=c["status"],
            wall_time=c.get("wall_time"),
            final_loss=c.get("final_loss"),
            error=c.get("error"),
        )
    return result


def run_sweep(
    plan: SweepPlan,
    ids: np.ndarray,
    vocab: Vocabulary,
    callback: Callable[[dict], None] | None = None,
    backend: str | None = None,
    corpus_fingerprint: str | None = None,
) -> SweepResult:
    """Train one embedding per (beta, replica); finished cells are skipped on rerun.

    A failed cell is recorded in the manifest and does not abort the rest.
    """
    out = plan.out_dir
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    try:
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as e:
        raise SweepError(f"output directory {out} is not writable: {e}") from e

    fingerprint = plan.base_config.fingerprint()
    if (out / MANIFEST_NAME).exists():
        result = load_manifest(out)
        if result.config_fingerprint != fingerprint:
            raise SweepError(
                f"existing manifest in {out} was produced with a different config "
                f"({result.config_fingerprint} != {fingerprint})"
            )
        result.scales = plan.scales
        result.replicas = plan.replicas
    else:
        result = SweepResult(
            out_dir=out,
            scales=plan.scales,
            replicas=plan.replicas,
            config_fingerprint=fingerprint,
        )

    for beta in plan.scales:
        for replica in range(plan.replicas):
            if result.done(beta, replica):
                if callback:
                    callback({"beta": beta, "replica": replica, "status": "skipped"})
                continue
            seed = derive_seed(plan.base_config.seed, beta, replica)
            cfg = plan.base_config.with_cell(beta, seed)
            fname = cell_filename(beta, replica)
            t0 = time.perf_counter()
            try:
                emb = train_embedding(
                    ids, vocab, cfg, backend=backend, corpus_fingerprint=corpus_fingerprint
                )
                emb.meta["replica"] = replica
                save_embedding(emb, out / fname)
                cell = CellResult(
                    beta=beta,
                    replica=replica,
                    seed=seed,
                    path=fname,
                    status="done",
                    wall_time=time.perf_counter() - t0,
                    final_loss=emb.meta.get("final_loss"),
                )
            except Exception:
                cell = CellResult(
                    beta=beta,
                    replica=replica,
                    seed=seed,
                    path=fname,
                    status="failed",
                    wall_time=time.perf_counter() - t0,
                    error=traceback.format_exc(limit=5),
                )
            result.cells[(beta, replica)] = cell
            _write_manifest(result)
            if callback:
                callback({"beta": beta, "replica": replica, "status": cell.status})
    return result
