"""Network container, forward evaluation, and input gradients.

A network is an ordered layer list over a fixed (M, N) spectrogram input,
ending in exactly ``num_classes`` logits (index 0 = bona fide, index 1 =
spoof).  Shape compatibility, including balanced residual markers, is
checked at construction.  Networks are treated as immutable after
construction; forward and gradient evaluation are pure.
"""

from __future__ import annotations

import copy

import numpy as np

from spectroshap.nn import layers as L


class TopologyError(ValueError):
    """Layer list does not compose over the declared input shape."""


class Network:
    def __init__(self, layers, input_shape, num_classes: int = 2):
        self.layers = list(layers)
        self.input_shape = (int(input_shape[0]), int(input_shape[1]))
        self.num_classes = int(num_classes)
        self.residual_pairs = self._check_topology()

    def _check_topology(self) -> dict[int, int]:
        """Propagate shapes through the layer list; map add -> begin indices."""
        shape = (1,) + self.input_shape
        begin_stack: list[tuple[int, tuple]] = []
        pairs: dict[int, int] = {}
        for li, layer in enumerate(self.layers):
            if layer.kind == L.RESIDUAL_BEGIN:
                begin_stack.append((li, shape))
            elif layer.kind == L.RESIDUAL_ADD:
                if not begin_stack:
                    raise TopologyError(f"layer {li}: residual_add without residual_begin")
                begin_idx, begin_shape = begin_stack.pop()
                if begin_shape != shape:
                    raise TopologyError(
                        f"layer {li}: residual_add shape {shape} does not match "
                        f"residual_begin shape {begin_shape}"
                    )
                pairs[li] = begin_idx
            try:
                shape = layer.out_shape(shape)
            except ValueError as exc:
                raise TopologyError(f"layer {li} ({layer.kind}): {exc}") from exc
        if begin_stack:
            raise TopologyError(
                f"layer {begin_stack[-1][0]}: residual_begin without residual_add"
            )
        if shape != (self.num_classes,):
            raise TopologyError(
                f"network must end in ({self.num_classes},) logits, got {shape}"
            )
        return pairs

    def prepare_input(self, x) -> np.ndarray:
        """Coerce a Spectrogram or (M, N) array to the (1, M, N) float32 input."""
        values = getattr(x, "values", x)
        arr = np.ascontiguousarray(values, dtype=np.float32)
        if arr.shape != self.input_shape:
            raise ValueError(
                f"input shape {arr.shape} does not match network input {self.input_shape}"
            )
        return arr[None, :, :]


def clone_network(net: Network) -> Network:
    return Network(copy.deepcopy(net.layers), net.input_shape, net.num_classes)


def forward_trace(net: Network, x) -> tuple[np.ndarray, list[dict]]:
    """Evaluate the network, recording each layer's input and routing aux.

    The trace is what both the gradient walker and the multiplier
    propagation consume: ``trace[i]["input"]`` is the activation entering
    layer i, ``trace[i]["aux"]`` its routing state (pool argmax indices).
    """
    a = net.prepare_input(x)
    trace: list[dict] = []
    saved: dict[int, np.ndarray] = {}
    begin_stack: list[int] = []
    for li, layer in enumerate(net.layers):
        rec = {"input": a, "aux": None}
        if layer.kind == L.RESIDUAL_BEGIN:
            saved[li] = a
            begin_stack.append(li)
            y = a
        elif layer.kind == L.RESIDUAL_ADD:
            y = a + saved[net.residual_pairs[li]]
        else:
            y, rec["aux"] = layer.forward(a)
        trace.append(rec)
        a = y
    return np.asarray(a, dtype=np.float32), trace


def forward(net: Network, x) -> np.ndarray:
    """Raw pre-softmax logit pair for one spectrogram."""
    logits, _ = forward_trace(net, x)
    return logits


def backprop_from_logits(net: Network, trace, d_logits) -> tuple[np.ndarray, dict]:
    """Walk the layers in reverse, returning (d_input, weight grads by index)."""
    grad = np.ascontiguousarray(d_logits, dtype=np.float32)
    skip: dict[int, np.ndarray] = {}
    wgrads: dict[int, tuple] = {}
    for li in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[li]
        rec = trace[li]
        if layer.kind == L.RESIDUAL_ADD:
            skip[net.residual_pairs[li]] = grad
        elif layer.kind == L.RESIDUAL_BEGIN:
            grad = grad + skip.pop(li)
        else:
            if layer.kind in L.PARAMETRIC_KINDS:
                wgrads[li] = layer.weight_grads(rec["input"], rec["aux"], grad)
            grad = layer.input_grad(rec["input"], rec["aux"], grad)
    return grad, wgrads


def input_gradient(net: Network, x, class_idx: int) -> np.ndarray:
    """d logit[class_idx] / d x(m, n) for every spectro-temporal bin."""
    if not 0 <= class_idx < net.num_classes:
        raise ValueError(f"class_idx={class_idx} out of range")
    _, trace = forward_trace(net, x)
    seed = np.zeros(net.num_classes, dtype=np.float32)
    seed[class_idx] = 1.0
    grad, _ = backprop_from_logits(net, trace, seed)
    return grad.reshape(net.input_shape)
