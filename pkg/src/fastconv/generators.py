"""Constructors for bilinear convolution algorithms."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import algebra
from .algebra import (
    INF,
    Polynomial,
    bezout_solve,
    check_nodes,
    exact_matmul,
    inverse,
    mod_operator,
    parse_poly,
    poly_mul,
    poly_divmod,
    rational_array,
    toeplitz_of,
    vandermonde,
)
from .bilinear import BilinearAlgorithm, ConvVariant, validate

INTEGER = "integer"
CHEBYSHEV = "chebyshev"


class GenerationError(ValueError):
    """An algorithm cannot be built from the requested parameters."""


def small_integers(count: int) -> list:
    """0, 1, -1, 2, -2, ... (``count`` values)."""
    out = [Fraction(0)]
    k = 1
    while len(out) < count:
        out.append(Fraction(k))
        if len(out) < count:
            out.append(Fraction(-k))
        k += 1
    return out[:count]


def default_nodes(count: int, scheme: str = INTEGER) -> list:
    """Node list for a rank-``count`` Toom-Cook algorithm.

    ``integer``: ``count - 1`` small integers followed by infinity.
    ``chebyshev``: first-kind Chebyshev points ``cos((2i+1)pi/(2 count))``, no
    infinity. These are taken at the exact value of their double rounding.
    """
    if count < 1:
        raise GenerationError("need at least one node")
    if scheme == INTEGER:
        return small_integers(count - 1) + [INF]
    if scheme == CHEBYSHEV:
        return [Fraction(x) for x in algebra.chebyshev_points(count)]
    raise GenerationError(f"unknown node scheme {scheme!r}")


def toom_cook(r: int, n: int, nodes: Sequence | None = None) -> BilinearAlgorithm:
    """Interpolation algorithm: ``A``/``B`` truncated Vandermonde, ``C`` its inverse."""
    R = n + r - 1
    if nodes is None:
        nodes = default_nodes(R)
    try:
        nodes = check_nodes(nodes)
    except (ValueError, algebra.DomainError) as exc:
        raise GenerationError(str(exc)) from None
    if len(nodes) != R:
        raise GenerationError(f"toom_cook({r},{n}) needs {R} nodes, got {len(nodes)}")
    A = vandermonde(nodes, r)
    B = vandermonde(nodes, n)
    C = inverse(vandermonde(nodes, R).T)
    return BilinearAlgorithm(A, B, C, ConvVariant.linear(r, n), {"method": "toom", "nodes": list(nodes)})


def trivial() -> BilinearAlgorithm:
    one = rational_array([[1]])
    return BilinearAlgorithm(one, one.copy(), one.copy(), ConvVariant.linear(1, 1), {"method": "trivial"})


# ---------------------------------------------------------------------------
# Winograd (CRT) construction

# Divisors added at each size n = r (n = 2 .. 9), cumulative.
TABLE3_ADDITIONS = {
    2: ["x^2+1", "x"],
    3: ["x+1", "x-1"],
    4: ["x+2", "x-2"],
    5: ["x+1/2", "x-1/2"],
    6: ["x+4", "x-4"],
    7: ["x+1/4", "x-1/4"],
    8: ["x^2+2"],
    9: ["x^2+1/2"],
}


def table3_divisors(n: int) -> list[Polynomial]:
    if n not in TABLE3_ADDITIONS:
        raise GenerationError(f"no tabulated divisor list for n={n}")
    out = []
    for k in range(2, n + 1):
        out.extend(parse_poly(s) for s in TABLE3_ADDITIONS[k])
    return out


def default_divisors(total_degree: int) -> list[Polynomial]:
    """Shortest prefix of the tabulated divisor sequence with the given degree sum."""
    if total_degree == 1:
        return [parse_poly("x")]
    seq = table3_divisors(9)
    out, deg = [], 0
    for m in seq:
        if deg == total_degree:
            break
        out.append(m)
        deg += m.degree
    if deg != total_degree:
        raise GenerationError(f"no default divisor set of total degree {total_degree}; pass divisors explicitly")
    return out


def parse_divisors(text: str) -> list[Polynomial]:
    return [parse_poly(t) for t in text.split(";") if t.strip()]


def _product(polys) -> Polynomial:
    out = Polynomial([Fraction(1)])
    for p in polys:
        out = poly_mul(out, p)
    return out


def check_coprime(divisors: Sequence[Polynomial]):
    for i, a in enumerate(divisors):
        for b in divisors[i + 1:]:
            try:
                bezout_solve(a, b)
            except algebra.NotCoprimeError:
                raise GenerationError(f"divisors {a} and {b} are not coprime") from None


def default_sub_algorithm(degree: int) -> BilinearAlgorithm:
    if degree == 1:
        return trivial()
    return _cached_toom(degree)


@lru_cache(maxsize=None)
def _cached_toom(k: int) -> BilinearAlgorithm:
    return toom_cook(k, k)


def winograd(
    r: int,
    n: int,
    divisors: Sequence[Polynomial] | None = None,
    sub_algs: Mapping[int, BilinearAlgorithm] | None = None,
) -> BilinearAlgorithm:
    """CRT-based algorithm from pairwise coprime divisors of total degree ``n+r-1``.

    Residues mod each divisor are convolved with a sub-algorithm for that
    divisor's degree and recombined with the idempotents ``e_i = M_i N_i mod M``.
    """
    if divisors is None:
        divisors = default_divisors(n + r - 1)
    divisors = [d if isinstance(d, Polynomial) else parse_poly(d) for d in divisors]
    if any(d.is_zero or d.degree < 1 for d in divisors):
        raise GenerationError("divisors must have degree >= 1")
    degM = sum(d.degree for d in divisors)
    if degM != n + r - 1:
        raise GenerationError(f"divisor degrees sum to {degM}, need {n + r - 1}")
    check_coprime(divisors)
    sub_algs = dict(sub_algs or {})
    M = _product(divisors)

    A_blocks, B_blocks, C_blocks = [], [], []
    for i, m in enumerate(divisors):
        k = m.degree
        sub = sub_algs.get(k) or default_sub_algorithm(k)
        if sub.variant != ConvVariant.linear(k, k) or not sub.exact:
            raise GenerationError(f"sub-algorithm for degree {k} must be an exact linear({k},{k}) algorithm")
        Mi = _product(divisors[:i] + divisors[i + 1:])
        Ni, _ = bezout_solve(Mi, m)
        _, e = poly_divmod(poly_mul(Mi, Ni), M)
        A_blocks.append(exact_matmul(mod_operator(m, r - 1).T, sub.A))
        B_blocks.append(exact_matmul(mod_operator(m, n - 1).T, sub.B))
        # reduce the sub-product mod m, multiply by e_i, reduce mod M
        reduce_m = mod_operator(m, sub.C.shape[0] - 1)
        T_e = toeplitz_of(rational_array(e.padded(degM)), k)
        reduce_M = mod_operator(M, degM + k - 2)
        C_blocks.append(exact_matmul(reduce_M, exact_matmul(T_e, exact_matmul(reduce_m, sub.C))))

    A = np.concatenate(A_blocks, axis=1)
    B = np.concatenate(B_blocks, axis=1)
    C = np.concatenate(C_blocks, axis=1)
    prov = {"method": "winograd", "divisors": [str(d) for d in divisors]}
    return BilinearAlgorithm(A, B, C, ConvVariant.linear(r, n), prov)


# ---------------------------------------------------------------------------
# transform-based algorithms


def dft_cyclic_alg(n: int) -> BilinearAlgorithm:
    D = algebra.dft_matrix(n)
    Dinv = D.conj() / n
    return BilinearAlgorithm(D.T.copy(), D.T.copy(), Dinv, ConvVariant.cyclic(n), {"method": "dft_cyclic"})


def dft_linear_alg(r: int, n: int) -> BilinearAlgorithm:
    """Cyclic DFT of size ``n+r-1`` with the zero padding folded into A and B."""
    N = n + r - 1
    D = algebra.dft_matrix(N)
    return BilinearAlgorithm(
        D.T[:r].copy(), D.T[:n].copy(), D.conj() / N, ConvVariant.linear(r, n), {"method": "dft_linear"}
    )


def dct_padding(n: int) -> tuple[int, int]:
    return n // 2 + 1, (3 * n) // 2 + 2


def dct_window_start(n: int) -> int:
    # 0-based; the 1-based form of the same offset is 2*floor(n/2) + 3
    return 2 * (n // 2) + 2


def _dct_pieces(n: int):
    pre, post = dct_padding(n)
    L = n + pre + post
    N = L - 1
    Cn = algebra.dct1_matrix(N)
    return pre, L, N, Cn


def calibrate_dct_window(n: int, trials: int = 3, seed: int = 0) -> int:
    """Search the output offset at which the padded DCT-I product holds ``f * g``."""
    from .fastexec import direct_conv_linear

    pre, L, N, Cn = _dct_pieces(n)
    rng = np.random.default_rng(seed)
    hits = set(range(L - (2 * n - 1) + 1))
    for _ in range(trials):
        f, g = rng.random(n), rng.random(n)
        fp = np.zeros(L)
        gp = np.zeros(L)
        fp[pre:pre + n] = f
        gp[pre:pre + n] = g
        y = 2 * (2 / N) * Cn @ ((Cn @ fp) * (Cn @ gp))
        ref = direct_conv_linear(f, g)
        hits &= {s for s in hits if np.max(np.abs(y[s:s + 2 * n - 1] - ref)) < 1e-8 * max(1, np.max(np.abs(ref)))}
    if len(hits) != 1:
        raise GenerationError(f"DCT window calibration for n={n} found {sorted(hits)}")
    return hits.pop()


def dct_linear_alg(n: int) -> BilinearAlgorithm:
    """Linear convolution of two length-``n`` vectors through a padded DCT-I.

    Both inputs are padded with ``n//2 + 1`` leading and ``3n//2 + 2`` trailing
    zeros; the result sits in twice the DCT-I bilinear output starting at
    :func:`dct_window_start`. The padding is folded into the matrices, so the
    result is an ordinary real bilinear algorithm of rank ``len(padded)``.
    """
    if n < 1:
        raise GenerationError("dct_linear_alg: n must be >= 1")
    pre, L, N, Cn = _dct_pieces(n)
    start = dct_window_start(n)
    enc = Cn[:, pre:pre + n].T.copy()
    dec = (4.0 / N) * Cn[start:start + 2 * n - 1]
    prov = {"method": "dct_linear", "pad_before": pre, "pad_after": L - n - pre, "window_start": start}
    return BilinearAlgorithm(enc, enc.copy(), dec, ConvVariant.linear(n, n), prov)


# ---------------------------------------------------------------------------
# fixed algorithms

KARATSUBA = {
    "A": [[1, 1, 0], [0, -1, 1]],
    "C": [[1, 0, 0], [1, -1, 1], [0, 0, 1]],
}

# rank-6 sparse algorithm for 3 x 3 linear convolution; all entries 0/+-1
SPARSE3 = {
    "A": [
        [1, 0, 0, 1, 1, 0],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 1, 0, 1, 1],
    ],
    "B": [
        [1, 0, 0, 1, 1, 0],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 1, 0, 1, 1],
    ],
    "C": [
        [1, 0, 0, 0, 0, 0],
        [-1, -1, 0, 1, 0, 0],
        [-1, 1, -1, 0, 1, 0],
        [0, -1, -1, 0, 0, 1],
        [0, 0, 1, 0, 0, 0],
    ],
}


def direct(r: int, n: int) -> BilinearAlgorithm:
    """Rank ``r*n`` algorithm with one product per pair ``f_i g_j``."""
    R = r * n
    A = algebra.rational_zeros((r, R))
    B = algebra.rational_zeros((n, R))
    C = algebra.rational_zeros((n + r - 1, R))
    for i in range(r):
        for j in range(n):
            l = i * n + j
            A[i, l] = B[j, l] = C[i + j, l] = Fraction(1)
    return BilinearAlgorithm(A, B, C, ConvVariant.linear(r, n), {"method": "direct"})


def fixed_algs(name: str, r: int | None = None, n: int | None = None) -> BilinearAlgorithm:
    if name == "karatsuba":
        A = rational_array(KARATSUBA["A"])
        return BilinearAlgorithm(A, A.copy(), rational_array(KARATSUBA["C"]), ConvVariant.linear(2, 2),
                                 {"method": "karatsuba"})
    if name == "sparse3":
        return BilinearAlgorithm(rational_array(SPARSE3["A"]), rational_array(SPARSE3["B"]),
                                 rational_array(SPARSE3["C"]), ConvVariant.linear(3, 3), {"method": "sparse3"})
    if name == "direct":
        if r is None or n is None:
            raise GenerationError("direct needs r and n")
        return direct(r, n)
    raise GenerationError(f"unknown fixed algorithm {name!r}")


def check_generated(alg: BilinearAlgorithm, tol: float = 1e-12):
    """Raise :class:`GenerationError` unless ``alg`` reproduces its tensor."""
    res = validate(alg)
    if (alg.exact and res != 0) or (not alg.exact and res > tol):
        raise GenerationError(f"generated algorithm fails validation (residual {float(res):.3e})")
    return alg
