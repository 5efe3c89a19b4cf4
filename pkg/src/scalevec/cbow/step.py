"""Reference single-step negative-sampling math.

This module is the semantic definition of one training step, written
plainly in numpy and dtype-preserving (run it in float64 for gradient
checks). The production loops in ``_kernel_c`` / ``_kernel_py`` implement
the same update over whole corpus blocks.

Loss for one (target, context) step with negatives j = 1..n:

    L = -log sigmoid(v'_target . h) - sum_j log sigmoid(-v'_j . h)

where h is the mean of the context input vectors (averaged mode) or a
single context vector (pairwise mode). Updates are plain SGD on L; in
averaged mode the context update carries the exact 1/|context| factor of
the true gradient.
"""

from __future__ import annotations

import numpy as np


def log_sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    # -log(1+exp(-x)), stable on both tails
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0, -np.log1p(np.exp(-x)), x - np.log1p(np.exp(x)))


def step_loss(
    syn0: np.ndarray,
    syn1: np.ndarray,
    target: int,
    context: np.ndarray,
    negatives: np.ndarray,
) -> float:
    """Averaged-mode loss with fixed negatives, no update."""
    h = syn0[context].mean(axis=0)
    u_pos = float(syn1[target] @ h)
    loss = -float(log_sigmoid(u_pos))
    if len(negatives):
        u = syn1[negatives] @ h
        loss -= float(np.sum(log_sigmoid(-u)))
    return loss


def step_grads(
    syn0: np.ndarray,
    syn1: np.ndarray,
    target: int,
    context: np.ndarray,
    negatives: np.ndarray,
) -> tuple[float, np.ndarray, dict[int, np.ndarray]]:
    """Analytic gradients of step_loss.

    Returns (loss, grad wrt each context input row (same for all, the
    1/cw-scaled hidden gradient), accumulated grads per output row id).
    Duplicate ids in negatives accumulate.
    """
    cw = len(context)
    h = syn0[context].mean(axis=0)
    rows = np.concatenate(([target], negatives)).astype(np.int64)
    labels = np.zeros(len(rows))
    labels[0] = 1.0
    u = syn1[rows] @ h
    sig = 1.0 / (1.0 + np.exp(-u))
    loss = -float(log_sigmoid(u[0]))
    if len(negatives):
        loss -= float(np.sum(log_sigmoid(-u[1:])))
    # dL/du_k = sig_k - label_k
    coeff = sig - labels
    grad_h = coeff @ syn1[rows]
    grad_context = grad_h / cw
    grad_out: dict[int, np.ndarray] = {}
    for r, c in zip(rows, coeff):
        g = c * h
        if int(r) in grad_out:
            grad_out[int(r)] = grad_out[int(r)] + g
        else:
            grad_out[int(r)] = g
    return loss, grad_context, grad_out


def apply_step(
    syn0: np.ndarray,
    syn1: np.ndarray,
    target: int,
    context: np.ndarray,
    negatives: np.ndarray,
    alpha: float,
    mode: str = "averaged",
) -> float:
    """One in-place SGD step; returns the loss before the update.

    In pairwise mode each context word is trained as its own step against
    the same negatives, and the summed loss is returned.
    """
    context = np.asarray(context, dtype=np.int64)
    if len(context) == 0:
        return 0.0
    if mode == "pairwise":
        total = 0.0
        for c in context:
            total += apply_step(syn0, syn1, target, np.array([c]), negatives, alpha, "averaged")
        return total
    loss, grad_context, grad_out = step_grads(syn0, syn1, target, context, negatives)
    dtype = syn0.dtype
    for r, g in grad_out.items():
        syn1[r] -= (alpha * g).astype(dtype)
    upd = (alpha * grad_context).astype(dtype)
    for c in context:
        syn0[c] -= upd
    return loss
