"""4-tuple analogical reasoning evaluation and accuracy-vs-scale curves.

Questions "a is to b as c is to d" are answered by 3CosAdd: the word
(excluding a, b, c) whose input vector has maximal cosine with
q = v_b - v_a + v_c, over unit-normalized vectors of the restrict_k most
frequent words. Questions touching words outside that search space are
skipped and excluded from the accuracy denominator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .cbow.model import Embedding
from .sweep import SweepResult


@dataclass(frozen=True)
class AnalogyQuestion:
    a: str
    b: str
    c: str
    d: str


@dataclass
class RelationSet:
    name: str
    questions: list[AnalogyQuestion]


@dataclass
class QuestionSuite:
    relations: list[RelationSet]
    malformed_lines: int = 0

    def __iter__(self):
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)


def load_questions(path: str | Path) -> QuestionSuite:
    """Parse the analogy task format: ``: name`` section headers, 4 words per line."""
    relations: list[RelationSet] = []
    current: RelationSet | None = None
    malformed = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith(":"):
                current = RelationSet(name=line[1:].strip(), questions=[])
                relations.append(current)
                continue
            parts = line.lower().split()
            if len(parts) != 4 or current is None:
                malformed += 1
                continue
            current.questions.append(AnalogyQuestion(*parts))
    relations = [r for r in relations if r.questions]
    if not any(r.questions for r in relations):
        raise ValueError(f"{path}: no valid analogy questions found")
    return QuestionSuite(relations=relations, malformed_lines=malformed)


class AnalogyEvaluator:
    """Caches the unit-normalized, frequency-restricted matrix for one embedding."""

    def __init__(self, embedding: Embedding, restrict_k: int = 30_000):
        v = len(embedding.vocab)
        self.restrict_k = min(restrict_k, v)
        m = embedding.input_vectors[: self.restrict_k].astype(np.float64)
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        self.matrix = m / norms
        self.index = embedding.vocab.index
        self.words = embedding.vocab.words

    def _rid(self, word: str) -> int | None:
        i = self.index.get(word)
        return i if i is not None and i < self.restrict_k else None

    def answer(self, a: str, b: str, c: str) -> str | None:
        """Predicted d, or None (skip) if any query word is outside the search space."""
        ia, ib, ic = self._rid(a), self._rid(b), self._rid(c)
        if ia is None or ib is None or ic is None:
            return None
        q = self.matrix[ib] - self.matrix[ia] + self.matrix[ic]
        scores = self.matrix @ q
        scores[[ia, ib, ic]] = -np.inf
        return self.words[int(np.argmax(scores))]

    def check(self, q: AnalogyQuestion) -> bool | None:
        """True/False if answered, None if skipped (any word outside the space)."""
        if self._rid(q.d) is None:
            return None
        pred = self.answer(q.a, q.b, q.c)
        if pred is None:
            return None
        return pred == q.d


@dataclass
class RelationAccuracy:
    relation: str
    answered: int
    skipped: int
    correct: int

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.answered if self.answered else None


def eval_relation(
    relation: RelationSet, embedding: Embedding | AnalogyEvaluator, restrict_k: int = 30_000
) -> RelationAccuracy:
    ev = embedding if isinstance(embedding, AnalogyEvaluator) else AnalogyEvaluator(embedding, restrict_k)
    answered = skipped = correct = 0
    for q in relation.questions:
        res = ev.check(q)
        if res is None:
            skipped += 1
        else:
            answered += 1
            correct += int(res)
    return RelationAccuracy(relation.name, answered, skipped, correct)


def peak_beta(betas: Iterable[int], values: Iterable[float | None]) -> int | None:
    """Scale attaining the maximum value; ties and equal maxima go to the smaller beta."""
    best_b, best_v = None, -math.inf
    for b, v in zip(betas, values):
        if v is not None and v > best_v:
            best_b, best_v = b, v
    return best_b


@dataclass
class RelationAccuracyCurve:
    relation: str
    betas: list[int]
    mean_accuracy: list[float | None]
    per_replica: dict[int, list[RelationAccuracy | None]] = field(repr=False, default_factory=dict)

    @property
    def peak_beta(self) -> int | None:
        return peak_beta(self.betas, self.mean_accuracy)


def accuracy_curves(
    sweep: SweepResult, suite: QuestionSuite, restrict_k: int = 30_000
) -> tuple[list[RelationAccuracyCurve], RelationAccuracyCurve]:
    """Per-relation curves (replica mean) plus the pooled overall curve.

    Missing sweep cells contribute None entries; they are never interpolated.
    """
    betas = sorted(sweep.scales)
    names = [r.name for r in suite.relations]
    # records[name][replica] -> list aligned with betas
    records: dict[str, dict[int, list[RelationAccuracy | None]]] = {
        n: {r: [None] * len(betas) for r in range(sweep.replicas)} for n in names
    }
    for bi, beta in enumerate(betas):
        for rep in range(sweep.replicas):
            if not sweep.done(beta, rep):
                continue
            ev = AnalogyEvaluator(sweep.load(beta, rep), restrict_k)
            for rel in suite.relations:
                records[rel.name][rep][bi] = eval_relation(rel, ev)

    curves = []
    for name in names:
        mean_acc: list[float | None] = []
        for bi in range(len(betas)):
            vals = [
                records[name][rep][bi].accuracy
                for rep in range(sweep.replicas)
                if records[name][rep][bi] is not None and records[name][rep][bi].accuracy is not None
            ]
            mean_acc.append(float(np.mean(vals)) if vals else None)
        curves.append(
            RelationAccuracyCurve(
                relation=name, betas=betas, mean_accuracy=mean_acc, per_replica=records[name]
            )
        )

    overall_mean: list[float | None] = []
    overall_reps: dict[int, list[RelationAccuracy | None]] = {
        r: [None] * len(betas) for r in range(sweep.replicas)
    }
    for bi in range(len(betas)):
        pooled_vals = []
        for rep in range(sweep.replicas):
            recs = [records[n][rep][bi] for n in names]
            if any(r is None for r in recs):
                continue
            answered = sum(r.answered for r in recs)
            correct = sum(r.correct for r in recs)
            skipped = sum(r.skipped for r in recs)
            overall_reps[rep][bi] = RelationAccuracy("overall", answered, skipped, correct)
            if answered:
                pooled_vals.append(correct / answered)
        overall_mean.append(float(np.mean(pooled_vals)) if pooled_vals else None)
    overall = RelationAccuracyCurve(
        relation="overall", betas=betas, mean_accuracy=overall_mean, per_replica=overall_reps
    )
    return curves, overall


def write_accuracy_tsv(
    curves: list[RelationAccuracyCurve], overall: RelationAccuracyCurve, path: str | Path
) -> None:
    """Per (relation, beta, replica) rows."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["relation", "beta", "replica", "accuracy", "answered", "skipped"])
        for curve in [*curves, overall]:
            for rep, recs in sorted(curve.per_replica.items()):
                for beta, rec in zip(curve.betas, recs):
                    if rec is None:
                        w.writerow([curve.relation, beta, rep, "missing", 0, 0])
                    else:
                        acc = "undefined" if rec.accuracy is None else f"{rec.accuracy:.6f}"
                        w.writerow([curve.relation, beta, rep, acc, rec.answered, rec.skipped])


def write_summary_tsv(
    curves: list[RelationAccuracyCurve], overall: RelationAccuracyCurve, path: str | Path
) -> None:
    """Peak scale and peak accuracy per relation (replica-mean curve)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["relation", "peak_beta", "peak_accuracy"])
        for curve in [*curves, overall]:
            pb = curve.peak_beta
            if pb is None:
                w.writerow([curve.relation, "undefined", "undefined"])
            else:
                acc = curve.mean_accuracy[curve.betas.index(pb)]
                w.writerow([curve.relation, pb, f"{acc:.6f}"])
