# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled convolution/pooling kernels.

float32 only, C-contiguous, channel-first layout.  Signatures mirror
spectroshap.kernels._numpy; per-output accumulation is done in double
before the float32 store.
"""

import numpy as np


def conv2d_forward(const float[:, :, ::1] x, const float[:, :, :, ::1] w,
                   const float[::1] b, Py_ssize_t sh, Py_ssize_t sw):
    cdef Py_ssize_t co = w.shape[0], ci = w.shape[1]
    cdef Py_ssize_t kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t ho = (x.shape[1] - kh) // sh + 1
    cdef Py_ssize_t wo = (x.shape[2] - kw) // sw + 1
    y = np.empty((co, ho, wo), dtype=np.float32)
    cdef float[:, :, ::1] yv = y
    cdef Py_ssize_t o, c, i, j, ki, kj, bi
    cdef double acc
    for o in range(co):
        for i in range(ho):
            for j in range(wo):
                acc = b[o]
                for c in range(ci):
                    for ki in range(kh):
                        bi = i * sh + ki
                        for kj in range(kw):
                            acc += x[c, bi, j * sw + kj] * w[o, c, ki, kj]
                yv[o, i, j] = <float> acc
    return y


def conv2d_input_grad(const float[:, :, ::1] dy, const float[:, :, :, ::1] w,
                      Py_ssize_t sh, Py_ssize_t sw, Py_ssize_t h, Py_ssize_t w_in):
    cdef Py_ssize_t co = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2]
    cdef Py_ssize_t ci = w.shape[1], kh = w.shape[2], kw = w.shape[3]
    dx = np.zeros((ci, h, w_in), dtype=np.float32)
    cdef float[:, :, ::1] dxv = dx
    cdef Py_ssize_t o, c, i, j, ki, kj, bi
    cdef float g
    for o in range(co):
        for i in range(ho):
            for j in range(wo):
                g = dy[o, i, j]
                for c in range(ci):
                    for ki in range(kh):
                        bi = i * sh + ki
                        for kj in range(kw):
                            dxv[c, bi, j * sw + kj] += w[o, c, ki, kj] * g
    return dx


def conv2d_weight_grad(const float[:, :, ::1] x, const float[:, :, ::1] dy,
                       Py_ssize_t kh, Py_ssize_t kw, Py_ssize_t sh, Py_ssize_t sw):
    cdef Py_ssize_t co = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2]
    cdef Py_ssize_t ci = x.shape[0]
    dw = np.empty((co, ci, kh, kw), dtype=np.float32)
    db = np.empty(co, dtype=np.float32)
    cdef float[:, :, :, ::1] dwv = dw
    cdef float[::1] dbv = db
    cdef Py_ssize_t o, c, i, j, ki, kj
    cdef double acc
    for o in range(co):
        for c in range(ci):
            for ki in range(kh):
                for kj in range(kw):
                    acc = 0.0
                    for i in range(ho):
                        for j in range(wo):
                            acc += x[c, i * sh + ki, j * sw + kj] * dy[o, i, j]
                    dwv[o, c, ki, kj] = <float> acc
    for o in range(co):
        acc = 0.0
        for i in range(ho):
            for j in range(wo):
                acc += dy[o, i, j]
        dbv[o] = <float> acc
    return dw, db


def maxpool_forward(const float[:, :, ::1] x, Py_ssize_t kh, Py_ssize_t kw,
                    Py_ssize_t sh, Py_ssize_t sw):
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef Py_ssize_t ho = (h - kh) // sh + 1
    cdef Py_ssize_t wo = (w - kw) // sw + 1
    y = np.empty((c, ho, wo), dtype=np.float32)
    idx = np.empty((c, ho, wo), dtype=np.int64)
    cdef float[:, :, ::1] yv = y
    cdef long long[:, :, ::1] iv = idx
    cdef Py_ssize_t ch, i, j, ki, kj, bi, bj
    cdef float best, v
    cdef long long besti
    for ch in range(c):
        for i in range(ho):
            for j in range(wo):
                best = x[ch, i * sh, j * sw]
                besti = (i * sh) * w + j * sw
                for ki in range(kh):
                    bi = i * sh + ki
                    for kj in range(kw):
                        bj = j * sw + kj
                        v = x[ch, bi, bj]
                        if v > best:
                            best = v
                            besti = bi * w + bj
                yv[ch, i, j] = best
                iv[ch, i, j] = besti
    return y, idx


def maxpool_backward(const float[:, :, ::1] dy, const long long[:, :, ::1] idx,
                     Py_ssize_t h, Py_ssize_t w):
    cdef Py_ssize_t c = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2]
    dx = np.zeros((c, h, w), dtype=np.float32)
    cdef float[:, :, ::1] dxv = dx
    cdef Py_ssize_t ch, i, j
    cdef long long f
    for ch in range(c):
        for i in range(ho):
            for j in range(wo):
                f = idx[ch, i, j]
                dxv[ch, f // w, f % w] += dy[ch, i, j]
    return dx


def avgpool_forward(const float[:, :, ::1] x, Py_ssize_t kh, Py_ssize_t kw,
                    Py_ssize_t sh, Py_ssize_t sw):
    cdef Py_ssize_t c = x.shape[0]
    cdef Py_ssize_t ho = (x.shape[1] - kh) // sh + 1
    cdef Py_ssize_t wo = (x.shape[2] - kw) // sw + 1
    y = np.empty((c, ho, wo), dtype=np.float32)
    cdef float[:, :, ::1] yv = y
    cdef Py_ssize_t ch, i, j, ki, kj
    cdef double acc, inv = 1.0 / (kh * kw)
    for ch in range(c):
        for i in range(ho):
            for j in range(wo):
                acc = 0.0
                for ki in range(kh):
                    for kj in range(kw):
                        acc += x[ch, i * sh + ki, j * sw + kj]
                yv[ch, i, j] = <float> (acc * inv)
    return y


def avgpool_backward(const float[:, :, ::1] dy, Py_ssize_t kh, Py_ssize_t kw,
                     Py_ssize_t sh, Py_ssize_t sw, Py_ssize_t h, Py_ssize_t w):
    cdef Py_ssize_t c = dy.shape[0], ho = dy.shape[1], wo = dy.shape[2]
    dx = np.zeros((c, h, w), dtype=np.float32)
    cdef float[:, :, ::1] dxv = dx
    cdef Py_ssize_t ch, i, j, ki, kj
    cdef float g
    cdef float inv = <float> (1.0 / (kh * kw))
    for ch in range(c):
        for i in range(ho):
            for j in range(wo):
                g = dy[ch, i, j] * inv
                for ki in range(kh):
                    for kj in range(kw):
                        dxv[ch, i * sh + ki, j * sw + kj] += g
    return dx
