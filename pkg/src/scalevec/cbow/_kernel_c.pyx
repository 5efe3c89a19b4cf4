# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled CBOW negative-sampling training kernel.

Sequential over the given target range; thread-safety comes from callers
running disjoint ranges with the GIL released (asynchronous shared-state
updates, lost writes tolerated).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log
from libc.stdlib cimport free, malloc

BACKEND_NAME = "cython"


def train_block(
    cnp.float32_t[:, ::1] syn0,
    cnp.float32_t[:, ::1] syn1,
    cnp.int32_t[::1] ids,
    long start,
    long end,
    cnp.int32_t[::1] bwin,
    cnp.int32_t[:, ::1] negs,
    cnp.float32_t[::1] alphas,
    bint pairwise,
):
    """Train targets ids[start:end] in place; windows clip at the ends of ids.

    Returns (summed loss, steps applied, empty-context skips).
    """
    cdef long n_ids = ids.shape[0]
    cdef long dim = syn0.shape[1]
    cdef long n_neg = negs.shape[1]
    cdef double loss_sum = 0.0
    cdef long steps = 0
    cdef long skipped = 0
    cdef float *h = <float *> malloc(dim * sizeof(float))
    cdef float *neu1e = <float *> malloc(dim * sizeof(float))
    if h == NULL or neu1e == NULL:
        free(h)
        free(neu1e)
        raise MemoryError()
    cdef long t, i, b, cs, ce, cw, j, d, r, w, c
    cdef float alpha, g
    cdef double f, sig, inv_cw
    try:
        with nogil:
            for t in range(start, end):
                i = t - start
                b = bwin[i]
                cs = t - b
                if cs < 0:
                    cs = 0
                ce = t + b + 1
                if ce > n_ids:
                    ce = n_ids
                cw = ce - cs - 1
                if cw <= 0:
                    skipped += 1
                    continue
                alpha = alphas[i]
                if pairwise:
                    for j in range(cs, ce):
                        if j == t:
                            continue
                        c = ids[j]
                        for d in range(dim):
                            h[d] = syn0[c, d]
                            neu1e[d] = 0.0
                        loss_sum += _rows(syn1, ids[t], negs, i, n_neg, dim, h, neu1e, alpha)
                        for d in range(dim):
                            syn0[c, d] += neu1e[d]
                        steps += 1
                else:
                    inv_cw = 1.0 / cw
                    for d in range(dim):
                        h[d] = 0.0
                        neu1e[d] = 0.0
                    for j in range(cs, ce):
                        if j == t:
                            continue
                        c = ids[j]
                        for d in range(dim):
                            h[d] += syn0[c, d]
                    for d in range(dim):
                        h[d] *= inv_cw
                    loss_sum += _rows(syn1, ids[t], negs, i, n_neg, dim, h, neu1e, alpha)
                    for d in range(dim):
                        neu1e[d] *= inv_cw
                    for j in range(cs, ce):
                        if j == t:
                            continue
                        c = ids[j]
                        for d in range(dim):
                            syn0[c, d] += neu1e[d]
                    steps += 1
    finally:
        free(h)
        free(neu1e)
    return loss_sum, steps, skipped


cdef inline double _rows(
    cnp.float32_t[:, ::1] syn1,
    long target,
    cnp.int32_t[:, ::1] negs,
    long i,
    long n_neg,
    long dim,
    float *h,
    float *neu1e,
    float alpha,
) nogil:
    """Score/update target and negative output rows; accumulate the hidden-layer error."""
    cdef long r, w, d
    cdef double f, sig, loss = 0.0
    cdef float g, label
    for r in range(n_neg + 1):
        if r == 0:
            w = target
            label = 1.0
        else:
            w = negs[i, r - 1]
            label = 0.0
        f = 0.0
        for d in range(dim):
            f += syn1[w, d] * h[d]
        if f > 30.0:
            f = 30.0
        elif f < -30.0:
            f = -30.0
        sig = 1.0 / (1.0 + exp(-f))
        if label == 1.0:
            loss -= log(sig)
        else:
            loss -= log(1.0 - sig)
        g = <float> ((label - sig) * alpha)
        for d in range(dim):
            neu1e[d] += g * syn1[w, d]
        for d in range(dim):
            syn1[w, d] += g * h[d]
    return loss
