"""Word-neighborhood analysis across sampling scales.

Tracks cosine-similarity curves of neighbors as a function of beta,
detects ordering crossovers between neighbors, builds top-N neighbor
catalogs unioned across scales, and bins catalog members by the scale at
which they peak.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .cbow.model import Embedding
from .analogy import peak_beta
from .sweep import SweepResult


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between u and v, clamped to [-1, 1]."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))


def top_n(center: str, embedding: Embedding, n: int) -> list[str]:
    """The n words most cosine-similar to center, descending; ties by vocab id."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if center not in embedding.vocab:
        raise KeyError(f"word {center!r} not in vocabulary")
    cid = embedding.vocab.id_of(center)
    m = embedding.input_vectors.astype(np.float64)
    norms = np.linalg.norm(m, axis=1)
    norms[norms == 0] = 1.0
    sims = (m @ m[cid]) / (norms * norms[cid])
    sims[cid] = -np.inf
    n = min(n, len(embedding.vocab) - 1)
    # stable sort on (-sim, id): argsort is stable for kind="stable"
    order = np.argsort(-sims, kind="stable")[:n]
    return [embedding.vocab.words[int(i)] for i in order]


@dataclass
class SimilarityCurve:
    center: str
    neighbor: str
    betas: list[int]
    values: list[float | None]  # replica-mean cosine, None where missing
    per_replica: dict[int, list[float | None]] = field(repr=False, default_factory=dict)

    @property
    def peak_beta(self) -> int | None:
        return peak_beta(self.betas, self.values)

    def replica_peaks(self) -> dict[int, int | None]:
        return {r: peak_beta(self.betas, v) for r, v in self.per_replica.items()}


class _SweepScanner:
    """Iterates sweep cells in ascending beta order, sharing loaded embeddings."""

    def __init__(self, sweep: SweepResult):
        self.sweep = sweep
        self.betas = sorted(sweep.scales)

    def cells(self):
        for beta in self.betas:
            for rep in range(self.sweep.replicas):
                if self.sweep.done(beta, rep):
                    yield beta, rep, self.sweep.load(beta, rep)


def similarity_curves(
    center: str, neighbors: Iterable[str], sweep: SweepResult
) -> list[SimilarityCurve]:
    """One similarity curve per neighbor, replica-averaged, with peak scales.

    A neighbor absent from the vocabulary at some scales gets None gaps; a
    neighbor absent everywhere (or a missing center) raises.
    """
    neighbors = list(neighbors)
    betas = sorted(sweep.scales)
    bidx = {b: i for i, b in enumerate(betas)}
    per: dict[str, dict[int, list[float | None]]] = {
        w: {r: [None] * len(betas) for r in range(sweep.replicas)} for w in neighbors
    }
    center_seen = False
    for beta, rep, emb in _SweepScanner(sweep).cells():
        if center not in emb.vocab:
            continue
        center_seen = True
        cvec = emb.vector(center)
        for w in neighbors:
            if w in emb.vocab:
                per[w][rep][bidx[beta]] = cosine(cvec, emb.vector(w))
    if not center_seen:
        raise KeyError(f"center word {center!r} not found in any sweep embedding")
    curves = []
    for w in neighbors:
        means: list[float | None] = []
        for i in range(len(betas)):
            vals = [per[w][r][i] for r in range(sweep.replicas) if per[w][r][i] is not None]
            means.append(float(np.mean(vals)) if vals else None)
        if all(v is None for v in means):
            raise KeyError(f"neighbor {w!r} not found in any sweep embedding")
        curves.append(
            SimilarityCurve(center=center, neighbor=w, betas=betas, values=means, per_replica=per[w])
        )
    return curves


@dataclass(frozen=True)
class CrossoverEvent:
    center: str
    word_x: str
    word_y: str
    beta_lo: int
    beta_hi: int


def detect_crossovers(curves: list[SimilarityCurve]) -> list[CrossoverEvent]:
    """Sign flips of sim(x) - sim(y) between consecutive grid scales.

    An exact zero at a grid point attributes the crossover to the interval
    ending at that point (a touch that returns to the same side is not an
    event). Gaps (None values) break the comparison chain.
    """
    if not curves:
        return []
    grid = curves[0].betas
    center = curves[0].center
    for c in curves[1:]:
        if c.betas != grid or c.center != center:
            raise ValueError("crossover detection requires curves on one grid and center")
    events = []
    for xi in range(len(curves)):
        for yi in range(xi + 1, len(curves)):
            cx, cy = curves[xi], curves[yi]
            prev_sign = 0
            prev_interval: tuple[int, int] | None = None
            last_idx: int | None = None
            for i, (vx, vy) in enumerate(zip(cx.values, cy.values)):
                if vx is None or vy is None:
                    prev_sign, last_idx = 0, None
                    continue
                d = vx - vy
                sign = (d > 0) - (d < 0)
                if sign == 0:
                    # zero point: if a flip materializes later, report the
                    # interval that ends here
                    if last_idx is not None and prev_interval is None:
                        prev_interval = (grid[last_idx], grid[i])
                    last_idx = i
                    continue
                if prev_sign != 0 and sign != prev_sign:
                    lo, hi = prev_interval or (grid[last_idx], grid[i])
                    events.append(CrossoverEvent(center, cx.neighbor, cy.neighbor, lo, hi))
                prev_sign = sign
                prev_interval = None
                last_idx = i
    return events


@dataclass
class NeighborCatalog:
    center: str
    n: int
    per_scale: dict[int, list[str]]
    union: set[str]


def build_catalog(center: str, sweep: SweepResult, n: int) -> NeighborCatalog:
    """Union of per-scale top-n neighbor lists across the sweep.

    At each scale the replica-mean similarity ranks the neighbors, so every
    per-scale list has exactly n entries (or V-1 if the vocabulary is
    smaller).
    """
    per_scale: dict[int, list[str]] = {}
    union: set[str] = set()
    acc: dict[int, tuple[np.ndarray, int, list[str]]] = {}
    for beta, rep, emb in _SweepScanner(sweep).cells():
        if center not in emb.vocab:
            raise KeyError(f"center word {center!r} missing at beta={beta}")
        cid = emb.vocab.id_of(center)
        m = emb.input_vectors.astype(np.float64)
        norms = np.linalg.norm(m, axis=1)
        norms[norms == 0] = 1.0
        sims = (m @ m[cid]) / (norms * norms[cid])
        if beta in acc:
            prev, cnt, words = acc[beta]
            acc[beta] = (prev + sims, cnt + 1, words)
        else:
            acc[beta] = (sims, 1, emb.vocab.words)
    if not acc:
        raise KeyError(f"sweep has no completed cells for catalog of {center!r}")
    for beta, (sims, cnt, words) in acc.items():
        mean = sims / cnt
        cid = words.index(center)
        mean[cid] = -np.inf
        take = min(n, len(words) - 1)
        order = np.argsort(-mean, kind="stable")[:take]
        ranked = [words[int(i)] for i in order]
        per_scale[beta] = ranked
        union.update(ranked)
    return NeighborCatalog(center=center, n=n, per_scale=per_scale, union=union)


@dataclass
class PeakScaleHistogram:
    center: str
    betas: list[int]
    counts: dict[int, int]
    fractions: dict[int, float]


def peak_histogram(catalog: NeighborCatalog, sweep: SweepResult) -> PeakScaleHistogram:
    """Distribution over the catalog of the scale at which each neighbor peaks."""
    if not catalog.union:
        raise ValueError("cannot build a histogram from an empty catalog")
    curves = similarity_curves(catalog.center, sorted(catalog.union), sweep)
    betas = sorted(sweep.scales)
    counts = {b: 0 for b in betas}
    for curve in curves:
        pb = curve.peak_beta
        if pb is not None:
            counts[pb] += 1
    total = sum(counts.values())
    fractions = {b: c / total for b, c in counts.items()}
    return PeakScaleHistogram(center=catalog.center, betas=betas, counts=counts, fractions=fractions)


# --- TSV output -----------------------------------------------------------


def write_curves_tsv(curves: list[SimilarityCurve], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["center", "neighbor", "beta", "mean_sim", "stddev"])
        for c in curves:
            for i, beta in enumerate(c.betas):
                vals = [c.per_replica[r][i] for r in c.per_replica if c.per_replica[r][i] is not None]
                if not vals:
                    w.writerow([c.center, c.neighbor, beta, "missing", "missing"])
                else:
                    w.writerow(
                        [c.center, c.neighbor, beta, f"{np.mean(vals):.6f}", f"{np.std(vals):.6f}"]
                    )


def write_crossovers_tsv(events: list[CrossoverEvent], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["center", "word1", "word2", "beta_lo", "beta_hi"])
        for e in events:
            w.writerow([e.center, e.word_x, e.word_y, e.beta_lo, e.beta_hi])


def write_histogram_tsv(hist: PeakScaleHistogram, path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["center", "beta", "fraction", "count"])
        for b in hist.betas:
            w.writerow([hist.center, b, f"{hist.fractions[b]:.9f}", hist.counts[b]])


def write_catalog_tsv(catalog: NeighborCatalog, path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["center", "n", "beta", "rank", "neighbor"])
        for beta in sorted(catalog.per_scale):
            for rank, word in enumerate(catalog.per_scale[beta]):
                w.writerow([catalog.center, catalog.n, beta, rank, word])
