# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: flattened direct convolution and radix-2 FFT."""
from libc.math cimport cos, sin, M_PI

BACKEND = "cython"


def conv_flat(const double[::1] fv, const long long[::1] fo,
              const double[::1] gv, const long long[::1] go, double[::1] out):
    cdef Py_ssize_t i, j, nf = fv.shape[0], ng = gv.shape[0]
    cdef double a
    cdef long long base
    with nogil:
        for i in range(nf):
            a = fv[i]
            if a == 0.0:
                continue
            base = fo[i]
            for j in range(ng):
                out[base + go[j]] += a * gv[j]


def fft_inplace(double complex[::1] x):
    cdef Py_ssize_t n = x.shape[0], i, j = 0, bit, size, half, k, start
    cdef double complex w, a, b, t
    cdef double ang
    with nogil:
        for i in range(1, n):
            bit = n >> 1
            while j & bit:
                j ^= bit
                bit >>= 1
            j |= bit
            if i < j:
                t = x[i]
                x[i] = x[j]
                x[j] = t
        size = 2
        while size <= n:
            half = size // 2
            for k in range(half):
                ang = -2.0 * M_PI * k / size
                w = cos(ang) + 1j * sin(ang)
                start = 0
                while start < n:
                    a = x[start + k]
                    b = w * x[start + k + half]
                    x[start + k] = a + b
                    x[start + k + half] = a - b
                    start += size
            size *= 2
