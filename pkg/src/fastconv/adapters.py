"""Compositions: overlap-add nesting, small-filter blocking, Agarwal-Cooley, low-rank 2-d."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import algebra
from .bilinear import (
    CYCLIC,
    LINEAR,
    BilinearAlgorithm,
    ConvVariant,
    apply,
    kron_nest,
)


def _is_linear_square(alg: BilinearAlgorithm) -> bool:
    v = alg.variant
    return isinstance(v, ConvVariant) and v.kind == LINEAR and v.r == v.n


# ---------------------------------------------------------------------------
# overlap-add


@dataclass(frozen=True)
class OverlapShape:
    gamma: int
    eta: int

    def __post_init__(self):
        if self.gamma < 1 or self.eta < 1:
            raise ValueError("overlap shape needs positive factors")

    @property
    def n(self) -> int:
        return self.gamma * self.eta


def overlap_add_matrix(shape: OverlapShape | tuple) -> np.ndarray:
    """0/1 matrix summing the overlapping tails of a row-major ``(2g-1) x (2e-1)`` block result."""
    if not isinstance(shape, OverlapShape):
        shape = OverlapShape(*shape)
    g, e = shape.gamma, shape.eta
    cols = (2 * g - 1) * (2 * e - 1)
    Q = algebra.rational_zeros((2 * g * e - 1, cols))
    one = algebra.rational(1)
    for j in range(cols):
        Q[j - (e - 1) * (j // (2 * e - 1)), j] = one
    return Q


def overlap_add_nest(alg_gamma: BilinearAlgorithm, alg_eta: BilinearAlgorithm) -> BilinearAlgorithm:
    """Build a linear(g*e, g*e) algorithm from linear(g, g) and linear(e, e) ones.

    Input index ``k`` maps to block position ``(k // e, k % e)``, which is just
    the row-major layout, so the encoders are plain Kronecker products and only
    the decoder is recombined by :func:`overlap_add_matrix`.
    """
    if not (_is_linear_square(alg_gamma) and _is_linear_square(alg_eta)):
        raise ValueError("overlap_add_nest needs two square linear algorithms")
    g, e = alg_gamma.variant.n, alg_eta.variant.n
    nest = kron_nest(alg_gamma, alg_eta)
    Q = overlap_add_matrix(OverlapShape(g, e))
    if nest.exact:
        C = algebra.exact_matmul(Q, nest.C)
    else:
        C = algebra.to_numeric(Q) @ algebra.to_numeric(nest.C)
    prov = {"method": "overlap_add", "shape": [g, e], "parts": [alg_gamma.provenance, alg_eta.provenance]}
    return BilinearAlgorithm(nest.A, nest.B, C, ConvVariant.linear(g * e, g * e), prov)


def small_filter_conv(f, g, alg_r: BilinearAlgorithm) -> np.ndarray:
    """Linear convolution of a short filter with a long signal, one block at a time."""
    f = np.asarray(f)
    g = np.asarray(g)
    r, n = f.size, g.size
    if r == 0 or n == 0:
        raise ValueError("small_filter_conv: empty input")
    if not _is_linear_square(alg_r) or alg_r.variant.n != r:
        raise ValueError(f"small_filter_conv needs a linear({r},{r}) algorithm")
    blocks = -(-n // r)
    gp = np.zeros(blocks * r, dtype=np.result_type(g, float))
    gp[:n] = g
    out = np.zeros(blocks * r + r - 1, dtype=np.result_type(f, gp))
    for b in range(blocks):
        out[b * r:b * r + 2 * r - 1] += apply(alg_r, f, gp[b * r:(b + 1) * r])
    return out[:n + r - 1]


# ---------------------------------------------------------------------------
# Agarwal-Cooley


@dataclass(frozen=True)
class CrtSplit:
    n1: int
    n2: int
    e1: int
    e2: int

    @property
    def n(self) -> int:
        return self.n1 * self.n2


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def crt_split(n1: int, n2: int) -> CrtSplit:
    if n1 < 1 or n2 < 1 or gcd(n1, n2) != 1:
        raise ValueError(f"sizes {n1} and {n2} are not coprime")
    _, m1, m2 = _ext_gcd(n1, n2)  # m1 n1 + m2 n2 = 1
    m1 %= n2
    m2 %= n1
    n = n1 * n2
    return CrtSplit(n1, n2, (m2 * n2) % n, (m1 * n1) % n)


def crt_permutation(n1: int, n2: int) -> tuple[np.ndarray, CrtSplit]:
    """Permutation ``P`` with ``P[i, j] = 1`` iff ``j = (i//n2 * e1 + i%n2 * e2) mod n``."""
    s = crt_split(n1, n2)
    P = algebra.rational_zeros((s.n, s.n))
    one = algebra.rational(1)
    for i in range(s.n):
        P[i, ((i // n2) * s.e1 + (i % n2) * s.e2) % s.n] = one
    return P, s


def _is_cyclic(alg) -> bool:
    return isinstance(alg.variant, ConvVariant) and alg.variant.kind == CYCLIC


def agarwal_cooley_nest(alg_n1: BilinearAlgorithm, alg_n2: BilinearAlgorithm) -> BilinearAlgorithm:
    """cyclic(n1*n2) from cyclic(n1) and cyclic(n2) with coprime sizes."""
    if not (_is_cyclic(alg_n1) and _is_cyclic(alg_n2)):
        raise ValueError("agarwal_cooley_nest needs cyclic algorithms")
    n1, n2 = alg_n1.variant.n, alg_n2.variant.n
    P, split = crt_permutation(n1, n2)
    nest = kron_nest(alg_n1, alg_n2)

    def pt(M):
        # P^T M; P is a permutation so this is a row gather
        rows = np.argmax(algebra.to_numeric(P).real, axis=1)
        out = np.empty_like(M)
        out[rows] = M
        return out

    prov = {"method": "agarwal_cooley", "split": [n1, n2], "e": [split.e1, split.e2],
            "parts": [alg_n1.provenance, alg_n2.provenance]}
    return BilinearAlgorithm(pt(nest.A), pt(nest.B), pt(nest.C), ConvVariant.cyclic(n1 * n2), prov)


# ---------------------------------------------------------------------------
# low-rank 2-d


@dataclass(frozen=True)
class RankFactors2D:
    """``F = sum_i sigma_i u_i v_i^T`` with ``U``/``V`` holding the vectors as columns."""

    sigma: np.ndarray
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma)
        U = np.asarray(self.U)
        V = np.asarray(self.V)
        if s.ndim != 1 or U.ndim != 2 or V.ndim != 2 or not (U.shape[1] == V.shape[1] == s.size):
            raise ValueError("RankFactors2D: need sigma (k,), U (n,k), V (n,k)")
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @property
    def rank(self) -> int:
        return self.sigma.size

    def matrix(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.T


def low_rank_conv2d(factors_F: RankFactors2D, factors_G: RankFactors2D, alg1d: BilinearAlgorithm) -> np.ndarray:
    r, n, _ = alg1d.sizes
    if factors_F.U.shape[0] != r or factors_F.V.shape[0] != r:
        raise ValueError(f"F factors must have length {r}")
    if factors_G.U.shape[0] != n or factors_G.V.shape[0] != n:
        raise ValueError(f"G factors must have length {n}")
    out = None
    for i in range(factors_F.rank):
        for j in range(factors_G.rank):
            s = factors_F.sigma[i] * factors_G.sigma[j]
            term = s * np.outer(apply(alg1d, factors_F.U[:, i], factors_G.U[:, j]),
                                apply(alg1d, factors_F.V[:, i], factors_G.V[:, j]))
            out = term if out is None else out + term
    if out is None:
        o = alg1d.sizes[2]
        out = np.zeros((o, o))
    return out


__all__ = [
    "OverlapShape", "overlap_add_matrix", "overlap_add_nest", "small_filter_conv",
    "CrtSplit", "crt_split", "crt_permutation", "agarwal_cooley_nest",
    "RankFactors2D", "low_rank_conv2d",
]
