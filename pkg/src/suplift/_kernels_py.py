"""Pure numpy versions of the compiled pair loops (same signatures)."""

import math

import numpy as np


def _pmean(a, b, p, w0, w1):
    out = np.zeros(np.broadcast(a, b).shape)
    pos = (a > 0) & (b > 0)
    a, b = np.broadcast_to(a, out.shape)[pos], np.broadcast_to(b, out.shape)[pos]
    if p == math.inf:
        out[pos] = np.maximum(a, b)
    elif p == -math.inf:
        out[pos] = np.minimum(a, b)
    elif abs(p) < 1e-10:
        out[pos] = np.exp(w0 * np.log(a) + w1 * np.log(b))
    else:
        out[pos] = (w0 * a**p + w1 * b**p) ** (1.0 / p)
    return out


def affine_pair_max(fvals, fidx, gvals, gidx, cf, cg, offset, out_shape, p, w0, w1):
    out_shape = np.asarray(out_shape, dtype=np.int64)
    out = np.zeros(int(np.prod(out_shape)))
    gpart = cg * np.asarray(gidx) + np.asarray(offset)
    for a in range(len(fvals)):
        idx = cf * fidx[a] + gpart
        ok = np.all((idx >= 0) & (idx < out_shape), axis=1)
        if not ok.any():
            continue
        flat = np.ravel_multi_index(idx[ok].T, out_shape)
        np.maximum.at(out, flat, _pmean(fvals[a], gvals[ok], p, w0, w1))
    return out


def heisenberg_pair_max(fvals, fx, gvals, gy, out_lo, h, out_shape, p, w0, w1):
    out_shape = np.asarray(out_shape, dtype=np.int64)
    out = np.zeros(int(np.prod(out_shape)))
    for a in range(len(fvals)):
        x = fx[a]
        z = gy + x
        z[:, 2] += 0.5 * (x[0] * gy[:, 1] - x[1] * gy[:, 0])
        idx = np.floor((z - out_lo) / h + 0.5).astype(np.int64)
        ok = np.all((idx >= 0) & (idx < out_shape), axis=1)
        if not ok.any():
            continue
        flat = np.ravel_multi_index(idx[ok].T, out_shape)
        np.maximum.at(out, flat, _pmean(fvals[a], gvals[ok], p, w0, w1))
    return out
