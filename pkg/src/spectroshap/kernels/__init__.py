"""Hot-loop kernels for the network runtime, with backend selection.

At import time the compiled Cython extension is preferred; when it is not
importable (source checkout without a build, unsupported platform) the
pure-numpy implementation is used instead.  Set SPECTROSHAP_KERNELS=numpy
to force the fallback, or SPECTROSHAP_KERNELS=native to fail loudly when
the extension is missing.  `BACKEND` names the selected implementation.

The float64 attribution paths (DeepLIFT propagation) call the numpy
implementations directly; only the float32 runtime goes through the
selected backend.
"""

import os

from . import _numpy

_choice = os.environ.get("SPECTROSHAP_KERNELS", "auto").lower()
if _choice not in ("auto", "native", "numpy"):
    raise ImportError(
        f"SPECTROSHAP_KERNELS={_choice!r} not understood; use 'native' or 'numpy'"
    )

_impl = None
if _choice in ("auto", "native"):
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "native":
            raise ImportError(
                "SPECTROSHAP_KERNELS=native but the compiled extension is not "
                "importable; build it with `pip install -e . --no-build-isolation`"
            )
if _impl is None:
    _impl = _numpy

BACKEND = "numpy" if _impl is _numpy else "native"

conv2d_forward = _impl.conv2d_forward
conv2d_input_grad = _impl.conv2d_input_grad
conv2d_weight_grad = _impl.conv2d_weight_grad
maxpool_forward = _impl.maxpool_forward
maxpool_backward = _impl.maxpool_backward
avgpool_forward = _impl.avgpool_forward
avgpool_backward = _impl.avgpool_backward

__all__ = [
    "BACKEND",
    "conv2d_forward",
    "conv2d_input_grad",
    "conv2d_weight_grad",
    "maxpool_forward",
    "maxpool_backward",
    "avgpool_forward",
    "avgpool_backward",
]
