from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "spectroshap.kernels._native",
                ["src/spectroshap/kernels/_native.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
else:
    # Pure-python install still works; the kernels package falls back to
    # the numpy implementation at import time.
    extensions = []

setup(ext_modules=extensions)
