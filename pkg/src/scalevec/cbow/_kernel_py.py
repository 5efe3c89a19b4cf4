"""Pure-numpy training kernel, the fallback when the compiled extension is absent.

Same contract as ``_kernel_c.train_block``; roughly 30-100x slower. Scores
for one step are computed from the pre-step matrices (matching
``step.py``), whereas the compiled kernel applies output-row updates
sequentially; the two only differ when a step draws duplicate negatives.
"""

from __future__ import annotations

import numpy as np

from .step import log_sigmoid

BACKEND_NAME = "python"


def train_block(
    syn0: np.ndarray,
    syn1: np.ndarray,
    ids: np.ndarray,
    start: int,
    end: int,
    bwin: np.ndarray,
    negs: np.ndarray,
    alphas: np.ndarray,
    pairwise: bool,
) -> tuple[float, int, int]:
    """Train targets ids[start:end] in place; windows clip at the ends of ids.

    Returns (summed loss, steps applied, empty-context skips).
    """
    n_ids = len(ids)
    n_neg = negs.shape[1]
    labels = np.zeros(n_neg + 1, dtype=np.float64)
    labels[0] = 1.0
    rows = np.empty(n_neg + 1, dtype=np.int64)
    loss_sum = 0.0
    steps = 0
    skipped = 0
    for t in range(start, end):
        i = t - start
        b = int(bwin[i])
        cs = max(0, t - b)
        ce = min(n_ids, t + b + 1)
        if ce - cs <= 1:
            skipped += 1
            continue
        ctx = np.concatenate((ids[cs:t], ids[t + 1 : ce])).astype(np.int64)
        rows[0] = ids[t]
        rows[1:] = negs[i]
        alpha = float(alphas[i])
        if pairwise:
            for c in ctx:
                loss_sum += _one(syn0, syn1, int(c), rows, labels, alpha, 1)
                steps += 1
        else:
            loss_sum += _one_avg(syn0, syn1, ctx, rows, labels, alpha)
            steps += 1
    return loss_sum, steps, skipped


def _one_avg(syn0, syn1, ctx, rows, labels, alpha):
    h = syn0[ctx].mean(axis=0).astype(np.float64)
    R = syn1[rows].astype(np.float64)
    u = R @ h
    sig = 1.0 / (1.0 + np.exp(-np.clip(u, -500, 500)))
    coeff = sig - labels
    loss = -float(log_sigmoid(u[0])) - float(np.sum(log_sigmoid(-u[1:])))
    np.add.at(syn1, rows, (-alpha * coeff[:, None] * h[None, :]).astype(syn1.dtype))
    neu1e = (-alpha / len(ctx)) * (coeff @ R)
    np.add.at(syn0, ctx, neu1e.astype(syn0.dtype))
    return loss


def _one(syn0, syn1, c, rows, labels, alpha, _cw):
    h = syn0[c].astype(np.float64)
    R = syn1[rows].astype(np.float64)
    u = R @ h
    sig = 1.0 / (1.0 + np.exp(-np.clip(u, -500, 500)))
    coeff = sig - labels
    loss = -float(log_sigmoid(u[0])) - float(np.sum(log_sigmoid(-u[1:])))
    np.add.at(syn1, rows, (-alpha * coeff[:, None] * h[None, :]).astype(syn1.dtype))
    syn0[c] += (-alpha * (coeff @ R)).astype(syn0.dtype)
    return loss
