"""Vectorized numpy implementations of the convolution and pooling kernels.

This is the fallback backend when the compiled extension is unavailable,
and the reference the native backend is tested against.  All functions are
dtype-preserving: float32 in, float32 out (the network runtime), float64 in,
float64 out (the attribution engines, which do their math in double).

Array layout is channel-first: activations are (C, H, W), convolution
weights are (C_out, C_in, KH, KW).  Convolutions and pools are "valid"
(no padding); trailing rows/columns that do not fill a window are dropped.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _windows(x: np.ndarray, kh: int, kw: int, sh: int, sw: int) -> np.ndarray:
    """Strided (C, Ho, Wo, kh, kw) view of all pooling/conv windows."""
    win = sliding_window_view(x, (kh, kw), axis=(1, 2))
    return win[:, ::sh, ::sw]


def conv2d_forward(x, w, b, sh, sw):
    cols = _windows(x, w.shape[2], w.shape[3], sh, sw)
    y = np.einsum("ihwkl,oikl->ohw", cols, w.astype(x.dtype, copy=False))
    y += b.astype(x.dtype, copy=False)[:, None, None]
    return np.ascontiguousarray(y)


def conv2d_input_grad(dy, w, sh, sw, h, w_in):
    n_out, ho, wo = dy.shape
    kh, kw = w.shape[2], w.shape[3]
    dx = np.zeros((w.shape[1], h, w_in), dtype=dy.dtype)
    wd = w.astype(dy.dtype, copy=False)
    for ki in range(kh):
        for kj in range(kw):
            contrib = np.einsum("ohw,oi->ihw", dy, wd[:, :, ki, kj])
            dx[:, ki : ki + sh * ho : sh, kj : kj + sw * wo : sw] += contrib
    return dx


def conv2d_weight_grad(x, dy, kh, kw, sh, sw):
    cols = _windows(x, kh, kw, sh, sw)
    dw = np.einsum("ihwkl,ohw->oikl", cols.astype(dy.dtype, copy=False), dy)
    db = dy.sum(axis=(1, 2))
    return np.ascontiguousarray(dw), db


def maxpool_forward(x, kh, kw, sh, sw):
    """Returns (pooled, idx) where idx holds the flat (H*W) position of each
    window maximum.  Ties resolve to the lowest flat index (first in
    row-major scan order), matching the native backend."""
    c, h, w = x.shape
    win = _windows(x, kh, kw, sh, sw)
    ho, wo = win.shape[1], win.shape[2]
    flat = win.reshape(c, ho, wo, kh * kw)
    within = flat.argmax(axis=3)
    y = np.take_along_axis(flat, within[..., None], axis=3)[..., 0]
    gi = within // kw + np.arange(ho, dtype=np.int64)[None, :, None] * sh
    gj = within % kw + np.arange(wo, dtype=np.int64)[None, None, :] * sw
    idx = gi * w + gj
    return np.ascontiguousarray(y), np.ascontiguousarray(idx.astype(np.int64))


def maxpool_backward(dy, idx, h, w):
    c = dy.shape[0]
    dx = np.zeros((c, h * w), dtype=dy.dtype)
    for ch in range(c):
        np.add.at(dx[ch], idx[ch].ravel(), dy[ch].ravel())
    return dx.reshape(c, h, w)


def avgpool_forward(x, kh, kw, sh, sw):
    win = _windows(x, kh, kw, sh, sw)
    return np.ascontiguousarray(win.mean(axis=(3, 4), dtype=x.dtype))


def avgpool_backward(dy, kh, kw, sh, sw, h, w):
    c, ho, wo = dy.shape
    dx = np.zeros((c, h, w), dtype=dy.dtype)
    g = dy / dy.dtype.type(kh * kw)
    for ki in range(kh):
        for kj in range(kw):
            dx[:, ki : ki + sh * ho : sh, kj : kj + sw * wo : sw] += g
    return dx
