"""Polynomial arithmetic and structured-matrix builders.

Matrices are plain numpy arrays. The scalar domain is carried by the dtype:

* ``object`` arrays of :class:`fractions.Fraction` -- exact rationals, used for
  every generation-time computation;
* ``float64`` -- real doubles, used for execution;
* ``complex128`` -- complex doubles (DFT based algorithms).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

RATIONAL = "rational"
REAL = "real"
COMPLEX = "complex"


class DomainError(TypeError):
    """Operands live in different scalar domains, or a conversion is illegal."""


class SingularMatrixError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# scalars and matrices


def rational(x) -> Fraction:
    """Coerce an exact value (int, Fraction, or 'p/q' string) to a Fraction.

    Floats are refused: binary doubles must never silently become "exact".
    """
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (np.integer,)):
        return Fraction(int(x))
    raise DomainError(f"cannot convert {type(x).__name__} {x!r} to an exact rational")


def rational_array(rows) -> np.ndarray:
    """Build an exact object array from nested sequences of exact values."""
    arr = np.array(rows, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = rational(v)
    return out


def rational_zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def rational_eye(n: int) -> np.ndarray:
    out = rational_zeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def domain_of(M) -> str:
    M = np.asarray(M)
    if M.dtype == object:
        if all(isinstance(v, Fraction) for v in M.flat):
            return RATIONAL
        if any(isinstance(v, complex) for v in M.flat):
            return COMPLEX
        return REAL
    if np.iscomplexobj(M):
        return COMPLEX
    return REAL


def to_numeric(M) -> np.ndarray:
    """Exact -> double conversion (the only direction allowed)."""
    M = np.asarray(M)
    if M.dtype != object:
        return M
    if any(isinstance(v, complex) for v in M.flat):
        return M.astype(complex)
    return M.astype(float)


def is_exact(M) -> bool:
    M = np.asarray(M)
    return M.dtype == object


def nnz(M) -> int:
    # Exact zero test: float matrices here are conversions of exact values.
    M = np.asarray(M)
    if M.dtype == object:
        return sum(1 for v in M.flat if v != 0)
    return int(np.count_nonzero(M))


def inverse(M) -> np.ndarray:
    """Exact inverse by Gauss-Jordan elimination with partial pivoting.

    Pivots are chosen by largest rational magnitude in the column.
    """
    M = np.asarray(M)
    n, m = M.shape
    if n != m:
        raise ValueError(f"inverse of non-square {n}x{m} matrix")
    aug = np.concatenate([M.astype(object), rational_eye(n)], axis=1)
    aug = rational_array(aug.tolist()) if n else aug
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(aug[i, col]))
        if aug[piv, col] == 0:
            raise SingularMatrixError("matrix is singular")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        p = aug[col, col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i, col] != 0:
                factor = aug[i, col]
                aug[i] = aug[i] - factor * aug[col]
    return aug[:, n:]


def solve(M, b) -> np.ndarray:
    """Exact solution of ``M x = b`` (square, nonsingular M)."""
    Minv = inverse(M)
    return Minv.dot(np.asarray(b, dtype=object))


def exact_matmul(X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=object)
    Y = np.asarray(Y, dtype=object)
    if X.shape[1] == 0:
        return rational_zeros((X.shape[0], Y.shape[1]))
    return X.dot(Y)


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ascending degree, trailing zeros stripped.

    The zero polynomial has ``coeffs == ()`` and ``degree is None``.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_exact(cls, coeffs: Iterable) -> "Polynomial":
        return cls(rational(c) for c in coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def domain(self) -> str:
        if not self.coeffs:
            return RATIONAL
        return _scalar_domain(self.coeffs)

    def padded(self, length: int) -> list:
        """Coefficient list zero-padded (never truncated) to ``length``."""
        if len(self.coeffs) > length:
            raise ValueError(f"polynomial of degree {self.degree} does not fit in {length} coefficients")
        zero = Fraction(0) if self.domain == RATIONAL else 0.0
        return list(self.coeffs) + [zero] * (length - len(self.coeffs))

    def monic(self) -> tuple["Polynomial", object]:
        """Return (monic polynomial, leading coefficient that was divided out)."""
        lc = self.lead
        return Polynomial(c / lc for c in self.coeffs), lc

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return Polynomial(c * other for c in self.coeffs)

    __rmul__ = __mul__

    def __add__(self, other: "Polynomial") -> "Polynomial":
        _check_same_domain(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.padded(n), other.padded(n)
        return Polynomial(x + y for x, y in zip(a, b))

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self):
        return format_poly(self)


def _scalar_domain(values) -> str:
    doms = set()
    for v in values:
        if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
            doms.add(RATIONAL)
        elif isinstance(v, complex):
            doms.add(COMPLEX)
        else:
            doms.add(REAL)
    if len(doms) > 1:
        raise DomainError(f"mixed scalar domains {sorted(doms)}")
    return doms.pop() if doms else RATIONAL


def _check_same_domain(p: Polynomial, q: Polynomial):
    if p.is_zero or q.is_zero:
        return
    if p.domain != q.domain:
        raise DomainError(f"domain mismatch: {p.domain} vs {q.domain}")


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    _check_same_domain(p, q)
    if p.is_zero or q.is_zero:
        return Polynomial()
    out = [0] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        for j, b in enumerate(q.coeffs):
            out[i + j] = out[i + j] + a * b
    return Polynomial(out)


def poly_divmod(p: Polynomial, m: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Exact long division, ``p = q*m + rho`` with ``deg rho < deg m``."""
    if m.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    if p.domain != RATIONAL or m.domain != RATIONAL:
        raise DomainError("poly_divmod requires exact rational coefficients")
    rem = [Fraction(c) for c in p.coeffs]
    dm = m.degree
    if p.is_zero or p.degree < dm:
        return Polynomial(), Polynomial(rem)
    quot = [Fraction(0)] * (p.degree - dm + 1)
    lc = Fraction(m.lead)
    for k in range(p.degree - dm, -1, -1):
        c = rem[k + dm] / lc
        quot[k] = c
        if c:
            for j, mc in enumerate(m.coeffs):
                rem[k + j] -= c * mc
    return Polynomial(quot), Polynomial(rem[:dm])


def format_poly(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    terms = []
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        else:
            s = f"{c}*{mono}" if mono else f"{c}"
        terms.append(s)
    out = " + ".join(reversed(terms))
    return out.replace("+ -", "- ")


def parse_poly(text: str) -> Polynomial:
    """Parse ``"x^2+1"``, ``"x-1/2"``, ``"3/4*x^3 - x"`` into an exact polynomial."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    terms = []
    i = 0
    while i < len(s):
        j = i + 1
        while j < len(s) and s[j] not in "+-":
            j += 1
        terms.append(s[i:j])
        i = j
    coeffs: dict[int, Fraction] = {}
    for t in terms:
        sign = -1 if t[0] == "-" else 1
        body = t[1:]
        if not body:
            raise ValueError(f"malformed term in {text!r}")
        if "x" in body:
            c_part, _, x_part = body.partition("x")
            c_part = c_part.rstrip("*")
            c = rational(c_part) if c_part else Fraction(1)
            if x_part == "":
                k = 1
            elif x_part.startswith("^"):
                k = int(x_part[1:])
            else:
                raise ValueError(f"malformed term {t!r} in {text!r}")
        else:
            c, k = rational(body), 0
        coeffs[k] = coeffs.get(k, Fraction(0)) + sign * c
    deg = max(coeffs)
    return Polynomial(coeffs.get(k, Fraction(0)) for k in range(deg + 1))


# ---------------------------------------------------------------------------
# structured matrices


def _zeros_like_domain(shape, sample):
    if is_exact(sample):
        return rational_zeros(shape)
    return np.zeros(shape, dtype=np.asarray(sample).dtype)


def toeplitz_of(f, n: int) -> np.ndarray:
    """Lower-trapezoidal Toeplitz matrix ``T`` with ``T @ g == f * g``.

    Shape is ``(n + r - 1, n)``; column ``j`` is ``f`` shifted down ``j`` places.
    """
    f = np.asarray(f.coeffs if isinstance(f, Polynomial) else f)
    if f.size == 0:
        raise ValueError("toeplitz_of: empty filter")
    if n < 0:
        raise ValueError("toeplitz_of: negative column count")
    r = f.size
    T = _zeros_like_domain((n + r - 1, n), f)
    for j in range(n):
        T[j:j + r, j] = f
    return T


def circulant_of(f) -> np.ndarray:
    """Circulant matrix with entry ``(i, j) = f[(i - j) mod n]``."""
    f = np.asarray(f)
    if f.size == 0:
        raise ValueError("circulant_of: empty vector")
    n = f.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return f[idx]


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def parse_node(tok):
    if tok is INF:
        return INF
    if isinstance(tok, str) and tok.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return rational(tok)


def check_nodes(nodes: Sequence) -> list:
    nodes = [parse_node(x) for x in nodes]
    finite = [x for x in nodes if x is not INF]
    if len(set(finite)) != len(finite):
        raise ValueError(f"duplicate nodes in {nodes}")
    n_inf = len(nodes) - len(finite)
    if n_inf > 1:
        raise ValueError("at most one infinity node is allowed")
    if n_inf == 1 and nodes[-1] is not INF:
        raise ValueError("the infinity node must be last")
    return nodes


def vandermonde(nodes: Sequence, num_rows: int) -> np.ndarray:
    """Truncated transposed Vandermonde matrix, rows = powers, columns = nodes.

    Entry ``(i, l)`` is ``x_l ** i``. An infinity node contributes a column that
    is zero except for a one in the last requested row (it picks off the
    leading coefficient).
    """
    nodes = check_nodes(nodes)
    V = rational_zeros((num_rows, len(nodes)))
    for l, x in enumerate(nodes):
        if x is INF:
            if num_rows:
                V[num_rows - 1, l] = Fraction(1)
            continue
        p = Fraction(1)
        for i in range(num_rows):
            V[i, l] = p
            p *= x
    return V


def mod_operator(m: Polynomial, d: int) -> np.ndarray:
    """Matrix ``X`` of shape ``(deg m, d + 1)`` with ``X @ p == p mod m``.

    Built as ``[I | -L U^-1]`` from the Toeplitz matrix of ``m``; a non-monic
    ``m`` is first scaled to monic, which leaves the remainder map unchanged.
    """
    if m.is_zero:
        raise ZeroDivisionError("mod_operator: zero divisor")
    if m.domain != RATIONAL:
        raise DomainError("mod_operator requires an exact divisor")
    mm, _ = m.monic()
    k = mm.degree
    if d < k:
        X = rational_zeros((k, d + 1))
        for i in range(d + 1):
            X[i, i] = Fraction(1)
        return X
    T = toeplitz_of(rational_array(mm.coeffs), d - k + 1)
    L, U = T[:k], T[k:]
    Uinv = _unit_upper_inverse(U)
    X = np.concatenate([rational_eye(k), -exact_matmul(L, Uinv)], axis=1)
    return X


def _unit_upper_inverse(U) -> np.ndarray:
    # U is upper triangular with unit diagonal for a monic divisor.
    n = U.shape[0]
    inv = rational_eye(n)
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            if U[i, j] != 0:
                inv[i] = inv[i] - U[i, j] * inv[j]
    return inv


class NotCoprimeError(ValueError):
    pass


def bezout_solve(Mhat: Polynomial, mhat: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Cofactors with ``Mhat*Nhat + mhat*nhat == 1``.

    Solves the stacked Toeplitz system ``[T_Mhat | T_mhat] [Nhat; nhat] = e0``
    exactly. A singular system means the inputs share a root.
    """
    if Mhat.is_zero or mhat.is_zero:
        raise NotCoprimeError("bezout_solve: zero polynomial")
    dM, dm = Mhat.degree, mhat.degree
    size = dM + dm
    if size == 0:
        # both constants
        return Polynomial([1 / Fraction(Mhat.lead)]), Polynomial()
    left = toeplitz_of(rational_array(Mhat.coeffs), dm)
    right = toeplitz_of(rational_array(mhat.coeffs), dM)
    system = np.concatenate([left, right], axis=1)
    rhs = rational_zeros(size)
    rhs[0] = Fraction(1)
    try:
        sol = solve(system, rhs)
    except SingularMatrixError:
        raise NotCoprimeError(f"{format_poly(Mhat)} and {format_poly(mhat)} are not coprime") from None
    return Polynomial(sol[:dm]), Polynomial(sol[dm:])


def dft_matrix(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("dft_matrix: n must be >= 1")
    k = np.arange(n)
    # exponent reduced mod n keeps the roots exact-ish for large m*k
    return np.exp(-2j * np.pi * ((k[:, None] * k[None, :]) % n) / n)


def dct1_matrix(N: int) -> np.ndarray:
    """DCT-I matrix of shape ``(N+1, N+1)`` with half weights on columns 0 and N."""
    if N < 1:
        raise ValueError("dct1_matrix: N must be >= 1")
    i = np.arange(N + 1)
    C = np.cos(np.pi * ((i[:, None] * i[None, :]) % (2 * N)) / N)
    C[:, 0] *= 0.5
    C[:, N] *= 0.5
    return C


def chebyshev_points(count: int) -> list[float]:
    return [math.cos((2 * i + 1) * math.pi / (2 * count)) for i in range(count)]


# ---------------------------------------------------------------------------
# serialization


def matrix_to_json(M) -> dict:
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("matrix_to_json expects a 2-d array")
    dom = domain_of(M)
    if dom == RATIONAL:
        entries = [str(v) if v.denominator != 1 else f"{v.numerator}/1" for v in M.flat]
    elif dom == COMPLEX:
        entries = [[float(complex(v).real), float(complex(v).imag)] for v in M.flat]
    else:
        entries = [float(v) for v in M.flat]
    return {"rows": M.shape[0], "cols": M.shape[1], "domain": dom, "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols, dom = obj["rows"], obj["cols"], obj["domain"]
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"matrix JSON: {len(entries)} entries for {rows}x{cols}")
    if dom == RATIONAL:
        out = rational_zeros(rows * cols)
        for i, e in enumerate(entries):
            out[i] = rational(e) if isinstance(e, str) else rational(int(e))
        return out.reshape(rows, cols)
    if dom == COMPLEX:
        return np.array([complex(re, im) for re, im in entries], dtype=complex).reshape(rows, cols)
    if dom == REAL:
        return np.array(entries, dtype=float).reshape(rows, cols)
    raise ValueError(f"unknown matrix domain {dom!r}")


__all__ = [
    "RATIONAL", "REAL", "COMPLEX", "INF", "DomainError", "SingularMatrixError", "NotCoprimeError",
    "Polynomial", "rational", "rational_array", "rational_zeros", "rational_eye", "domain_of",
    "to_numeric", "is_exact", "nnz", "inverse", "solve", "exact_matmul", "poly_mul", "poly_divmod",
    "parse_poly", "format_poly", "toeplitz_of", "circulant_of", "vandermonde", "check_nodes",
    "parse_node", "mod_operator", "bezout_solve", "dft_matrix", "dct1_matrix", "chebyshev_points",
    "matrix_to_json", "matrix_from_json",
]
