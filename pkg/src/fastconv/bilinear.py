"""Bilinear algorithms ``y = C[(A^T f) * (B^T g)]`` for discrete convolution.

Vectorization is row-major throughout: an ``a x b`` matrix ``M`` maps to the
vector with ``vec(M)[i*b + j] = M[i, j]``, which is what ``numpy.kron`` and
``ndarray.ravel()`` produce.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Union

import numpy as np

from . import algebra
from .algebra import RATIONAL, is_exact, matrix_from_json, matrix_to_json, to_numeric

LINEAR = "linear"
CYCLIC = "cyclic"
CORRELATION = "correlation"

IMAG_WARN_THRESHOLD = 1e-10


class ImaginaryResidualWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ConvVariant:
    """One convolution variant with its sizes.

    ``r`` is the filter length. ``n`` is the input length for linear and cyclic
    convolution and the *output* length for correlation.
    """

    kind: str
    r: int
    n: int

    def __post_init__(self):
        if self.kind not in (LINEAR, CYCLIC, CORRELATION):
            raise ValueError(f"unknown convolution variant {self.kind!r}")
        if self.r < 1 or self.n < 1:
            raise ValueError(f"sizes must be positive, got r={self.r}, n={self.n}")
        if self.kind == CYCLIC and self.r != self.n:
            raise ValueError("cyclic convolution needs equal input sizes")

    @classmethod
    def linear(cls, r: int, n: int) -> "ConvVariant":
        return cls(LINEAR, r, n)

    @classmethod
    def cyclic(cls, n: int) -> "ConvVariant":
        return cls(CYCLIC, n, n)

    @classmethod
    def correlation(cls, r: int, n_out: int) -> "ConvVariant":
        return cls(CORRELATION, r, n_out)

    @property
    def f_len(self) -> int:
        return self.r

    @property
    def g_len(self) -> int:
        return self.n + self.r - 1 if self.kind == CORRELATION else self.n

    @property
    def out_len(self) -> int:
        if self.kind == LINEAR:
            return self.n + self.r - 1
        return self.n

    def __str__(self):
        if self.kind == CYCLIC:
            return f"cyclic({self.n})"
        return f"{self.kind}({self.r},{self.n})"


Variant = Union[ConvVariant, tuple]


def _parts(variant) -> tuple:
    return variant if isinstance(variant, tuple) else (variant,)


def _dims(variant) -> tuple[int, int, int]:
    f = g = o = 1
    for v in _parts(variant):
        f, g, o = f * v.f_len, g * v.g_len, o * v.out_len
    return f, g, o


@dataclass(frozen=True, eq=False)
class BilinearAlgorithm:
    """Matrices ``A (|f| x R)``, ``B (|g| x R)``, ``C (|y| x R)`` plus metadata.

    ``variant`` is a :class:`ConvVariant`, or a tuple of them for a
    Kronecker-nested (multidimensional) algorithm. Exact algorithms hold
    ``Fraction`` object arrays; :attr:`numeric` gives the double copies used
    for execution.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    variant: Variant
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        A, B, C = self.A, self.B, self.C
        if A.ndim != 2 or B.ndim != 2 or C.ndim != 2:
            raise ValueError("A, B, C must be 2-d")
        if not (A.shape[1] == B.shape[1] == C.shape[1]):
            raise ValueError(f"column counts differ: {A.shape[1]}, {B.shape[1]}, {C.shape[1]}")
        f, g, o = _dims(self.variant)
        if (A.shape[0], B.shape[0], C.shape[0]) != (f, g, o):
            raise ValueError(
                f"row counts {(A.shape[0], B.shape[0], C.shape[0])} do not match {self.variant} ({f}, {g}, {o})"
            )
        v = self.variant
        if isinstance(v, ConvVariant) and v.kind == LINEAR and self.rank < v.r + v.n - 1:
            raise ValueError(f"rank {self.rank} is below the minimum {v.r + v.n - 1} for {v}")

    @property
    def rank(self) -> int:
        return self.A.shape[1]

    @property
    def exact(self) -> bool:
        return is_exact(self.A) and is_exact(self.B) and is_exact(self.C)

    @property
    def is_complex(self) -> bool:
        return any(np.iscomplexobj(to_numeric(M)) for M in (self.A, self.B, self.C))

    @cached_property
    def numeric(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.ascontiguousarray(to_numeric(M)) for M in (self.A, self.B, self.C))

    @property
    def sizes(self) -> tuple[int, int, int]:
        return _dims(self.variant)

    def to_json(self) -> dict:
        f, g, o = self.sizes
        return {
            "variant": _variant_to_json(self.variant),
            "r": f,
            "n": g,
            "out": o,
            "rank": self.rank,
            "provenance": _jsonable(self.provenance),
            "A": matrix_to_json(self.A),
            "B": matrix_to_json(self.B),
            "C": matrix_to_json(self.C),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BilinearAlgorithm":
        alg = cls(
            matrix_from_json(obj["A"]),
            matrix_from_json(obj["B"]),
            matrix_from_json(obj["C"]),
            _variant_from_json(obj["variant"]),
            dict(obj.get("provenance", {})),
        )
        if alg.rank != obj.get("rank", alg.rank):
            raise ValueError("rank field disagrees with matrix shapes")
        return alg


def _variant_to_json(v):
    if isinstance(v, tuple):
        return {"kind": "nested", "parts": [_variant_to_json(p) for p in v]}
    return {"kind": v.kind, "r": v.r, "n": v.n}


def _variant_from_json(obj):
    if isinstance(obj, str):
        raise ValueError("variant must be an object with kind/r/n")
    if obj["kind"] == "nested":
        return tuple(_variant_from_json(p) for p in obj["parts"])
    return ConvVariant(obj["kind"], obj["r"], obj["n"])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if x is algebra.INF:
        return "inf"
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


# ---------------------------------------------------------------------------
# tensor and validation


def conv_tensor(variant) -> np.ndarray:
    """0/1 tensor ``t[i, j, k]`` with ``y_k = sum_ij t_ijk f_i g_j``."""
    if isinstance(variant, tuple):
        T = np.ones((1, 1, 1), dtype=np.int64)
        for v in variant:
            T = np.kron(T, conv_tensor(v))
        return T
    v = variant
    i = np.arange(v.f_len)[:, None, None]
    j = np.arange(v.g_len)[None, :, None]
    k = np.arange(v.out_len)[None, None, :]
    if v.kind == LINEAR:
        mask = i + j - k == 0
    elif v.kind == CYCLIC:
        mask = (i + j - k) % v.n == 0
    else:
        mask = i - j + k == 0
    return mask.astype(np.int64)


def cp_reconstruct(A, B, C) -> np.ndarray:
    """``sum_l A[i,l] B[j,l] C[k,l]`` for all ``(i, j, k)``; exact for object arrays."""
    if is_exact(A) and is_exact(B) and is_exact(C):
        out = algebra.rational_zeros((A.shape[0], B.shape[0], C.shape[0]))
        for l in range(A.shape[1]):
            a, b, c = A[:, l], B[:, l], C[:, l]
            if not (np.any(a != 0) and np.any(b != 0) and np.any(c != 0)):
                continue
            out = out + a[:, None, None] * b[None, :, None] * c[None, None, :]
        return out
    A, B, C = (to_numeric(M) for M in (A, B, C))
    return np.einsum("il,jl,kl->ijk", A, B, C)


def validate(alg: BilinearAlgorithm, tol: float | None = None):
    """Max entrywise residual between the CP reconstruction and the tensor.

    Returns an exact ``Fraction`` for exact algorithms (zero means the
    algorithm is provably correct) and a float otherwise. With ``tol`` given,
    raises :class:`ValidationError` when the residual exceeds it.
    """
    T = conv_tensor(alg.variant)
    recon = cp_reconstruct(alg.A, alg.B, alg.C)
    if alg.exact:
        res = max((abs(v) for v in (recon - T).flat), default=Fraction(0))
    else:
        res = float(np.max(np.abs(recon - T))) if T.size else 0.0
    if tol is not None and res > tol:
        raise ValidationError(f"residual {float(res):.3e} exceeds tolerance {tol:.3e}")
    return res


def default_tolerance(alg: BilinearAlgorithm) -> float:
    A, B, C = alg.numeric
    scale = max(np.max(np.abs(A)), 1) * max(np.max(np.abs(B)), 1) * max(np.max(np.abs(C)), 1)
    return 1e-12 * alg.rank * float(scale)


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# execution


def _finish(y, alg_complex: bool, inputs_real: bool):
    if alg_complex and inputs_real:
        imag = float(np.max(np.abs(y.imag))) if y.size else 0.0
        if imag > IMAG_WARN_THRESHOLD:
            warnings.warn(f"imaginary residual {imag:.3e} discarded", ImaginaryResidualWarning, stacklevel=3)
        return y.real.copy()
    return y


def apply(alg: BilinearAlgorithm, f, g) -> np.ndarray:
    """Evaluate ``C[(A^T f) * (B^T g)]`` in floating point."""
    A, B, C = alg.numeric
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != (A.shape[0],) or g.shape != (B.shape[0],):
        raise ValueError(f"input sizes {f.shape}, {g.shape} do not match {alg.variant}")
    y = C @ ((A.T @ f) * (B.T @ g))
    return _finish(y, np.iscomplexobj(y), not (np.iscomplexobj(f) or np.iscomplexobj(g)))


def apply_exact(alg: BilinearAlgorithm, f, g) -> np.ndarray:
    """Same as :func:`apply` but in exact rational arithmetic."""
    if not alg.exact:
        raise algebra.DomainError("apply_exact needs an exact algorithm")
    f = algebra.rational_array(list(f))
    g = algebra.rational_array(list(g))
    return alg.C.dot(alg.A.T.dot(f) * alg.B.T.dot(g))


def interchange(alg: BilinearAlgorithm) -> BilinearAlgorithm:
    """Swap ``B`` and ``C``: linear(r, n) <-> correlation(r, n)."""
    v = alg.variant
    if not isinstance(v, ConvVariant) or v.kind == CYCLIC:
        raise ValueError(f"matrix interchange needs a 1-d linear or correlation algorithm, got {v}")
    new_kind = CORRELATION if v.kind == LINEAR else LINEAR
    prov = dict(alg.provenance)
    prov["interchanged"] = not prov.get("interchanged", False)
    return BilinearAlgorithm(alg.A, alg.C, alg.B, ConvVariant(new_kind, v.r, v.n), prov)


def _kron(X, Y):
    if is_exact(X) and is_exact(Y):
        return np.kron(X, Y)
    return np.kron(to_numeric(X), to_numeric(Y))


def kron_nest(alg1: BilinearAlgorithm, alg2: BilinearAlgorithm) -> BilinearAlgorithm:
    """Kronecker product ``(A1 x A2, B1 x B2, C1 x C2)`` of two algorithms."""
    kinds = {v.kind for v in _parts(alg1.variant) + _parts(alg2.variant)}
    if len(kinds) > 1:
        raise ValueError(f"cannot nest different variant families {sorted(kinds)}")
    prov = {"method": "kron", "parts": [alg1.provenance, alg2.provenance]}
    return BilinearAlgorithm(
        _kron(alg1.A, alg2.A),
        _kron(alg1.B, alg2.B),
        _kron(alg1.C, alg2.C),
        _parts(alg1.variant) + _parts(alg2.variant),
        prov,
    )


def apply_2d(alg: BilinearAlgorithm, F, G) -> np.ndarray:
    """``Y = C[(A^T F A) * (B^T G B)] C^T`` for a 1-d algorithm."""
    A, B, C = alg.numeric
    F = np.asarray(F)
    G = np.asarray(G)
    if F.shape != (A.shape[0],) * 2 or G.shape != (B.shape[0],) * 2:
        raise ValueError(f"apply_2d: shapes {F.shape}, {G.shape} do not match {alg.variant}")
    Y = C @ ((A.T @ F @ A) * (B.T @ G @ B)) @ C.T
    return _finish(Y, np.iscomplexobj(Y), not (np.iscomplexobj(F) or np.iscomplexobj(G)))


MAX_DIM = 4


def mode_product(X: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Multiply every mode of ``X`` by ``M`` (``X x_1 M x_2 M ...``)."""
    for axis in range(X.ndim):
        X = np.moveaxis(np.tensordot(M, X, axes=([1], [axis])), 0, axis)
    return X


def apply_nd(alg: BilinearAlgorithm, F, G, max_dim: int = MAX_DIM) -> np.ndarray:
    """d-fold nested application of a 1-d algorithm to cubical tensors.

    Encodes and decodes mode by mode; the ``d``-fold Kronecker matrices are
    never formed.
    """
    A, B, C = alg.numeric
    F = np.asarray(F)
    G = np.asarray(G)
    d = F.ndim
    if d != G.ndim or d < 1:
        raise ValueError("apply_nd: F and G must have the same positive order")
    if d > max_dim:
        raise ValueError(f"apply_nd: order {d} exceeds the limit {max_dim}")
    if F.shape != (A.shape[0],) * d or G.shape != (B.shape[0],) * d:
        raise ValueError(f"apply_nd: shapes {F.shape}, {G.shape} do not match {alg.variant}")
    Y = mode_product(mode_product(F, A.T) * mode_product(G, B.T), C)
    return _finish(Y, np.iscomplexobj(Y), not (np.iscomplexobj(F) or np.iscomplexobj(G)))


__all__ = [
    "LINEAR", "CYCLIC", "CORRELATION", "ConvVariant", "BilinearAlgorithm", "ValidationError",
    "ImaginaryResidualWarning", "conv_tensor", "cp_reconstruct", "validate", "default_tolerance",
    "apply", "apply_exact", "interchange", "kron_nest", "apply_2d", "apply_nd", "mode_product",
]
