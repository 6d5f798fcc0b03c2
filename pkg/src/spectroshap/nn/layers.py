"""Layer primitives for the minimal feedforward runtime.

Supported kinds are the minimal closure needed by the attribution engines:
linear-family layers (dense, conv2d, avgpool2d, residual_add), the relu
nonlinearity, and routing layers (maxpool2d, flatten).  Activations are
float32; convolution/pooling work goes through the selected kernel backend.

Every layer implements:

* ``out_shape(in_shape)`` -- shape propagation with validation,
* ``forward(x) -> (y, aux)`` -- aux carries routing state (pool argmax),
* ``input_grad(x, aux, dy) -> dx`` -- gradient w.r.t. the layer input.

Parametric layers additionally expose ``weights``/``bias`` and
``weight_grads(x, aux, dy)``.
"""

from __future__ import annotations

import numpy as np

from spectroshap import kernels

DENSE = "dense"
CONV2D = "conv2d"
RELU = "relu"
MAXPOOL2D = "maxpool2d"
AVGPOOL2D = "avgpool2d"
FLATTEN = "flatten"
RESIDUAL_BEGIN = "residual_begin"
RESIDUAL_ADD = "residual_add"


def _f32(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float32)


def _pair(v) -> tuple[int, int]:
    if isinstance(v, (int, np.integer)):
        return int(v), int(v)
    a, b = v
    return int(a), int(b)


class Dense:
    kind = DENSE

    def __init__(self, weights, bias):
        self.weights = _f32(weights)
        self.bias = _f32(bias)
        if self.weights.ndim != 2:
            raise ValueError("dense weights must be 2-D (units, in_features)")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError(
                f"dense bias length {self.bias.shape} does not match units "
                f"{self.weights.shape[0]}"
            )

    @property
    def units(self) -> int:
        return self.weights.shape[0]

    @property
    def in_features(self) -> int:
        return self.weights.shape[1]

    def out_shape(self, in_shape):
        if len(in_shape) != 1 or in_shape[0] != self.in_features:
            raise ValueError(
                f"dense expects flat input of {self.in_features} features, got {in_shape}"
            )
        return (self.units,)

    def forward(self, x):
        return self.weights @ x + self.bias, None

    def input_grad(self, x, aux, dy):
        return self.weights.T @ dy

    def weight_grads(self, x, aux, dy):
        return np.outer(dy, x), dy.copy()


class Conv2d:
    kind = CONV2D

    def __init__(self, weights, bias, stride=(1, 1)):
        self.weights = _f32(weights)
        self.bias = _f32(bias)
        self.stride = _pair(stride)
        if self.weights.ndim != 4:
            raise ValueError("conv2d weights must be 4-D (out_ch, in_ch, kh, kw)")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError(
                f"conv2d bias length {self.bias.shape} does not match out_channels "
                f"{self.weights.shape[0]}"
            )
        if min(self.stride) < 1:
            raise ValueError(f"conv2d stride {self.stride} must be >= 1")

    @property
    def kernel(self) -> tuple[int, int]:
        return self.weights.shape[2], self.weights.shape[3]

    def out_shape(self, in_shape):
        if len(in_shape) != 3 or in_shape[0] != self.weights.shape[1]:
            raise ValueError(
                f"conv2d expects (C={self.weights.shape[1]}, H, W) input, got {in_shape}"
            )
        kh, kw = self.kernel
        sh, sw = self.stride
        if in_shape[1] < kh or in_shape[2] < kw:
            raise ValueError(f"conv2d kernel {self.kernel} larger than input {in_shape}")
        return (
            self.weights.shape[0],
            (in_shape[1] - kh) // sh + 1,
            (in_shape[2] - kw) // sw + 1,
        )

    def forward(self, x):
        return kernels.conv2d_forward(x, self.weights, self.bias, *self.stride), None

    def input_grad(self, x, aux, dy):
        return kernels.conv2d_input_grad(
            _f32(dy), self.weights, *self.stride, x.shape[1], x.shape[2]
        )

    def weight_grads(self, x, aux, dy):
        return kernels.conv2d_weight_grad(x, _f32(dy), *self.kernel, *self.stride)


class ReLU:
    kind = RELU

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        return np.maximum(x, 0), None

    def input_grad(self, x, aux, dy):
        return dy * (x > 0)


class MaxPool2d:
    kind = MAXPOOL2D

    def __init__(self, kernel, stride=None):
        self.kernel = _pair(kernel)
        self.stride = _pair(stride) if stride is not None else self.kernel
        if min(self.kernel) < 1 or min(self.stride) < 1:
            raise ValueError("pool kernel and stride must be >= 1")

    def out_shape(self, in_shape):
        if len(in_shape) != 3:
            raise ValueError(f"maxpool2d expects (C, H, W) input, got {in_shape}")
        kh, kw = self.kernel
        sh, sw = self.stride
        if in_shape[1] < kh or in_shape[2] < kw:
            raise ValueError(f"pool kernel {self.kernel} larger than input {in_shape}")
        return (in_shape[0], (in_shape[1] - kh) // sh + 1, (in_shape[2] - kw) // sw + 1)

    def forward(self, x):
        y, idx = kernels.maxpool_forward(x, *self.kernel, *self.stride)
        return y, idx

    def input_grad(self, x, aux, dy):
        return kernels.maxpool_backward(_f32(dy), aux, x.shape[1], x.shape[2])


class AvgPool2d:
    kind = AVGPOOL2D

    def __init__(self, kernel, stride=None):
        self.kernel = _pair(kernel)
        self.stride = _pair(stride) if stride is not None else self.kernel
        if min(self.kernel) < 1 or min(self.stride) < 1:
            raise ValueError("pool kernel and stride must be >= 1")

    out_shape = MaxPool2d.out_shape

    def forward(self, x):
        return kernels.avgpool_forward(x, *self.kernel, *self.stride), None

    def input_grad(self, x, aux, dy):
        return kernels.avgpool_backward(
            _f32(dy), *self.kernel, *self.stride, x.shape[1], x.shape[2]
        )


class Flatten:
    kind = FLATTEN

    def out_shape(self, in_shape):
        n = 1
        for d in in_shape:
            n *= d
        return (n,)

    def forward(self, x):
        return np.ascontiguousarray(x.reshape(-1)), None

    def input_grad(self, x, aux, dy):
        return dy.reshape(x.shape)


class ResidualBegin:
    """Marks the start of a skip connection; forward is the identity.

    The network walker snapshots the activation here and re-injects it at
    the matching ResidualAdd.
    """

    kind = RESIDUAL_BEGIN

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        return x, None

    def input_grad(self, x, aux, dy):
        return dy


class ResidualAdd:
    """Adds the activation saved at the matching ResidualBegin."""

    kind = RESIDUAL_ADD

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):  # skip addition happens in the network walker
        return x, None

    def input_grad(self, x, aux, dy):
        return dy


PARAMETRIC_KINDS = (DENSE, CONV2D)
ALL_KINDS = (
    DENSE,
    CONV2D,
    RELU,
    MAXPOOL2D,
    AVGPOOL2D,
    FLATTEN,
    RESIDUAL_BEGIN,
    RESIDUAL_ADD,
)
