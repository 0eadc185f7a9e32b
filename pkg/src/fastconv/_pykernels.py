"""Pure-Python/numpy versions of the hot kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``FASTCONV_PURE_PYTHON=1`` is set.
"""
import cmath

import numpy as np

BACKEND = "python"


def conv_flat(fv, fo, gv, go, out):
    """``out[fo[i] + go[j]] += fv[i] * gv[j]`` for real float64 data."""
    for i in range(fv.shape[0]):
        a = fv[i]
        if a == 0.0:
            continue
        base = fo[i]
        for j in range(gv.shape[0]):
            out[base + go[j]] += a * gv[j]


def fft_inplace(x):
    """Iterative radix-2 DIT transform of a complex128 array, in place."""
    n = x.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            x[i], x[j] = x[j], x[i]
    size = 2
    while size <= n:
        half = size // 2
        for k in range(half):
            w = cmath.exp(-2j * cmath.pi * k / size)
            for start in range(0, n, size):
                a = x[start + k]
                b = w * x[start + k + half]
                x[start + k] = a + b
                x[start + k + half] = a - b
        size *= 2
