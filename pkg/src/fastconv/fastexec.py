"""Reference oracles and fast executors (FFT, symmetric Hankel).

The hot loops live in a compiled extension when it is available; set
``FASTCONV_PURE_PYTHON=1`` to force the numpy fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .bilinear import CORRELATION, CYCLIC, LINEAR, ConvVariant

if os.environ.get("FASTCONV_PURE_PYTHON") == "1":
    from . import _pykernels as _k
else:
    try:
        from . import _kernels as _k
    except ImportError:  # extension not built
        from . import _pykernels as _k

BACKEND = _k.BACKEND


def _is_object(*arrs) -> bool:
    return any(a.dtype == object for a in arrs)


# ---------------------------------------------------------------------------
# oracles


def _strides(shape) -> np.ndarray:
    st = np.ones(len(shape), dtype=np.int64)
    for i in range(len(shape) - 2, -1, -1):
        st[i] = st[i + 1] * shape[i + 1]
    return st


def _flat_offsets(shape, out_strides) -> np.ndarray:
    idx = np.indices(shape).reshape(len(shape), -1)
    return np.ascontiguousarray((out_strides[:, None] * idx).sum(axis=0), dtype=np.int64)


def _conv_real(F: np.ndarray, G: np.ndarray, kernels=None) -> np.ndarray:
    k = kernels or _k
    out_shape = tuple(a + b - 1 for a, b in zip(F.shape, G.shape))
    st = _strides(out_shape)
    out = np.zeros(int(np.prod(out_shape)))
    k.conv_flat(np.ascontiguousarray(F, dtype=float).ravel(), _flat_offsets(F.shape, st),
                np.ascontiguousarray(G, dtype=float).ravel(), _flat_offsets(G.shape, st), out)
    return out.reshape(out_shape)


def _conv_exact(F: np.ndarray, G: np.ndarray) -> np.ndarray:
    out_shape = tuple(a + b - 1 for a, b in zip(F.shape, G.shape))
    out = np.empty(out_shape, dtype=object)
    out.fill(0)
    for i in np.ndindex(F.shape):
        if F[i] == 0:
            continue
        for j in np.ndindex(G.shape):
            out[tuple(a + b for a, b in zip(i, j))] += F[i] * G[j]
    return out


def _linear_nd(F, G, kernels=None) -> np.ndarray:
    if F.size == 0 or G.size == 0:
        raise ValueError("empty input")
    if _is_object(F, G):
        return _conv_exact(F, G)
    if np.iscomplexobj(F) or np.iscomplexobj(G):
        Fr, Fi = F.real, F.imag
        Gr, Gi = G.real, G.imag
        c = lambda a, b: _conv_real(a, b, kernels)
        return (c(Fr, Gr) - c(Fi, Gi)) + 1j * (c(Fr, Gi) + c(Fi, Gr))
    return _conv_real(F, G, kernels)


def direct_conv_linear(f, g) -> np.ndarray:
    f = np.asarray(f)
    g = np.asarray(g)
    if f.ndim != 1 or g.ndim != 1:
        raise ValueError("direct_conv_linear expects vectors")
    return _linear_nd(f, g)


def direct_conv(f, g, variant: ConvVariant) -> np.ndarray:
    """Brute-force summation for a linear, cyclic or correlation convolution."""
    f = np.asarray(f)
    g = np.asarray(g)
    if (f.shape, g.shape) != ((variant.f_len,), (variant.g_len,)):
        raise ValueError(f"sizes {f.shape}, {g.shape} do not match {variant}")
    if variant.kind == LINEAR:
        return _linear_nd(f, g)
    full = _linear_nd(f, g) if variant.kind == CYCLIC else _linear_nd(f[::-1], g)
    if variant.kind == CYCLIC:
        n = variant.n
        y = full[:n].copy()
        y[:n - 1] += full[n:]
        return y
    if variant.kind == CORRELATION:
        # y_k = sum_i f_i g_{i+k} is entry k + r - 1 of (reversed f) * g
        r = variant.r
        return full[r - 1:r - 1 + variant.out_len].copy()
    raise ValueError(f"unknown variant {variant}")


def direct_conv_nd(F, G, max_dim: int = 4, kernels=None) -> np.ndarray:
    """d-dimensional linear convolution by direct summation (d <= 4)."""
    F = np.asarray(F)
    G = np.asarray(G)
    if F.ndim != G.ndim:
        raise ValueError("direct_conv_nd: F and G must have the same order")
    if F.ndim > max_dim:
        raise ValueError(f"direct_conv_nd: order {F.ndim} exceeds the limit {max_dim}")
    return _linear_nd(F, G, kernels)


# ---------------------------------------------------------------------------
# FFT


def _check_pow2(n: int):
    if n < 1 or n & (n - 1):
        raise ValueError(f"FFT length {n} is not a power of 2")


def fft(x, kernels=None) -> np.ndarray:
    """Radix-2 FFT with the ``exp(-2 pi i jk/n)`` sign convention."""
    y = np.array(x, dtype=np.complex128).ravel()
    _check_pow2(y.size)
    (kernels or _k).fft_inplace(y)
    return y


def ifft(x, kernels=None) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    return np.conj(fft(np.conj(x), kernels)) / x.size


def next_pow2(m: int) -> int:
    return 1 << max(0, (m - 1).bit_length())


def fft_conv(f, g) -> np.ndarray:
    f = np.asarray(f)
    g = np.asarray(g)
    m = f.size + g.size - 1
    N = next_pow2(m)
    fp = np.zeros(N, dtype=np.complex128)
    gp = np.zeros(N, dtype=np.complex128)
    fp[:f.size] = f
    gp[:g.size] = g
    y = ifft(fft(fp) * fft(gp))[:m]
    if not (np.iscomplexobj(f) or np.iscomplexobj(g)):
        return y.real.copy()
    return y


@dataclass
class OpCounter:
    adds: int = 0
    mults: int = 0

    def as_tuple(self) -> tuple[int, int]:
        return self.adds, self.mults


FFT_BASE_COST = (0, 2)


def fft_counted(x, counter: OpCounter | None = None):
    """Recursive even/odd FFT that tallies complex operations.

    Uses the cost convention of the textbook recurrence: a size-2 transform is
    charged ``FFT_BASE_COST`` and each combine step ``n/2`` addition pairs and
    ``n/2`` twiddle multiplications. Returns ``(y, counter)``.
    """
    x = np.asarray(x, dtype=np.complex128)
    _check_pow2(x.size)
    if x.size < 2:
        raise ValueError("fft_counted needs n >= 2")
    counter = counter if counter is not None else OpCounter()
    return _fft_rec(x, counter), counter


def _fft_rec(x, c: OpCounter):
    n = x.size
    if n == 2:
        c.adds += FFT_BASE_COST[0]
        c.mults += FFT_BASE_COST[1]
        return np.array([x[0] + x[1], x[0] - x[1]])
    even = _fft_rec(x[0::2], c)
    odd = _fft_rec(x[1::2], c)
    w = np.exp(-2j * np.pi * np.arange(n // 2) / n) * odd
    c.mults += n // 2
    c.adds += n // 2
    return np.concatenate([even + w, even - w])


# ---------------------------------------------------------------------------
# symmetric Hankel


HANKEL_THRESHOLD = 4


def _hankel_matvec(x, z, threshold, counter):
    k = z.size
    if k <= threshold:
        if counter is not None:
            counter.mults += k * k
        H = x[np.arange(k)[:, None] + np.arange(k)[None, :]]
        return H @ z
    h = k // 2
    x1, x2, x3 = x[0:2 * h - 1], x[h:3 * h - 1], x[2 * h:4 * h - 1]
    z1, z2 = z[:h], z[h:]
    if counter is not None:
        counter.adds += 2 * (2 * h - 1) + h  # input differences and z1 + z2
    p1 = _hankel_matvec(x1 - x2, z1, threshold, counter)
    p2 = _hankel_matvec(x2, z1 + z2, threshold, counter)
    p3 = _hankel_matvec(x3 - x2, z2, threshold, counter)
    if counter is not None:
        counter.adds += 2 * h
    return np.concatenate([p1 + p2, p2 + p3])


def hankel_sym_conv(f, g, threshold: int = HANKEL_THRESHOLD, counter: OpCounter | None = None) -> np.ndarray:
    """Linear convolution through a square symmetric Hankel product.

    ``g`` is reversed and the zero-embedded ``f`` defines a Hankel matrix of
    order ``2n - 1`` (padded to a power of 2); the product is split
    recursively into three half-size Hankel products.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.size == 0 or g.size == 0:
        raise ValueError("hankel_sym_conv: empty input")
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    n = max(f.size, g.size)
    out_len = f.size + g.size - 1
    dtype = np.result_type(f, g, float)
    fp = np.zeros(n, dtype=dtype)
    gp = np.zeros(n, dtype=dtype)
    fp[:f.size] = f
    gp[:g.size] = g
    N = next_pow2(2 * n - 1)
    x = np.zeros(2 * N - 1, dtype=dtype)
    x[n - 1:2 * n - 1] = fp
    z = np.zeros(N, dtype=dtype)
    z[:n] = gp[::-1]
    y = _hankel_matvec(x, z, threshold, counter)
    return y[:out_len]


def hankel_mult_count(n: int, threshold: int = HANKEL_THRESHOLD) -> int:
    """Multiplications used by :func:`hankel_sym_conv` for inputs of size ``n``."""
    k = next_pow2(2 * n - 1)
    levels = 0
    while k > threshold:
        k //= 2
        levels += 1
    return 3 ** levels * k * k


__all__ = [
    "BACKEND", "direct_conv", "direct_conv_linear", "direct_conv_nd", "fft", "ifft", "fft_conv",
    "next_pow2", "OpCounter", "FFT_BASE_COST", "fft_counted", "hankel_sym_conv", "hankel_mult_count",
    "HANKEL_THRESHOLD",
]
