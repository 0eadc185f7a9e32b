from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastconv import algebra as al
from fastconv.algebra import INF, Polynomial, parse_poly

import oracles

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def P(*cs):
    return Polynomial(F(c) for c in cs)


# -- scalars -----------------------------------------------------------------


def test_rational_refuses_floats():
    with pytest.raises(al.DomainError):
        al.rational(0.5)
    assert al.rational("-6/4") == F(-3, 2)
    assert al.rational(np.int64(3)) == 3


def test_nnz_counts_exact_zeros_only():
    assert al.nnz(al.rational_array([[0, 1], ["1/3", 0]])) == 2
    assert al.nnz(np.array([1e-300, 0.0])) == 1


# -- polynomials ---------------------------------------------------------------


def test_poly_mul_examples():
    assert al.poly_mul(P(1, 2), P(3, 4)) == P(3, 10, 8)
    p = P(1, -2, 5)
    assert al.poly_mul(p, P(1)) == p
    assert al.poly_mul(p, Polynomial()).is_zero


def test_poly_mul_domain_mismatch():
    with pytest.raises(al.DomainError):
        al.poly_mul(P(1, 2), Polynomial([1.0, 2.0]))


def test_zero_polynomial_sentinel():
    z = Polynomial([F(0), F(0)])
    assert z.is_zero and z.degree is None


@pytest.mark.parametrize("p, m, q, rho", [
    (P(0, 0, 0, 1), P(1, 0, 1), P(0, 1), P(0, -1)),
    (P(1, 2), P(1, 0, 1), Polynomial(), P(1, 2)),
    (P(-1, 0, 1), P(-1, 1), P(1, 1), Polynomial()),
])
def test_poly_divmod_examples(p, m, q, rho):
    assert al.poly_divmod(p, m) == (q, rho)


def test_poly_divmod_rejects_zero_and_floats():
    with pytest.raises(ZeroDivisionError):
        al.poly_divmod(P(1), Polynomial())
    with pytest.raises(al.DomainError):
        al.poly_divmod(Polynomial([1.0]), P(1, 1))


@given(st.lists(small_q, min_size=1, max_size=7), st.lists(small_q, min_size=1, max_size=4))
def test_divmod_identity(pc, mc):
    p, m = Polynomial(pc), Polynomial(mc)
    if m.is_zero:
        return
    q, rho = al.poly_divmod(p, m)
    assert al.poly_mul(q, m) + rho == p
    assert rho.is_zero or rho.degree < m.degree


@pytest.mark.parametrize("text, coeffs", [
    ("x^2+1", [1, 0, 1]),
    ("x-1/2", [F(-1, 2), 1]),
    ("3/4*x^3 - x", [0, -1, 0, F(3, 4)]),
    ("x", [0, 1]),
])
def test_parse_poly(text, coeffs):
    assert parse_poly(text) == Polynomial(F(c) for c in coeffs)
    assert parse_poly(str(parse_poly(text))) == parse_poly(text)


def test_parse_poly_rejects_garbage():
    for bad in ["", "x^", "2y", "+"]:
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_poly(bad)


# -- structured matrices -------------------------------------------------------


def test_toeplitz_examples():
    T = al.toeplitz_of(al.rational_array([1, 2]), 3)
    assert (T == al.rational_array([[1, 0, 0], [2, 1, 0], [0, 2, 1], [0, 0, 2]])).all()
    T1 = al.toeplitz_of(al.rational_array([7]), 2)
    assert (T1 == al.rational_array([[7, 0], [0, 7]])).all()
    assert list(T.dot(al.rational_array([3, 4, 5])))[:4] == [3, 10, 13, 10]
    with pytest.raises(ValueError):
        al.toeplitz_of([], 2)


@given(st.lists(small_q, min_size=1, max_size=6), st.lists(small_q, min_size=1, max_size=6))
def test_toeplitz_matches_summation(f, g):
    T = al.toeplitz_of(al.rational_array(f), len(g))
    assert list(T.dot(al.rational_array(g))) == oracles.linear(f, g)


def test_circulant_examples():
    C = al.circulant_of(np.array([1, 2]))
    assert C.tolist() == [[1, 2], [2, 1]]
    assert (al.circulant_of(np.eye(4)[0]) == np.eye(4)).all()
    assert (C @ [3, 4]).tolist() == [11, 10]


def test_vandermonde_examples():
    assert (al.vandermonde([0, 1, INF], 2) == al.rational_array([[1, 1, 0], [0, 1, 1]])).all()
    assert (al.vandermonde([0], 1) == al.rational_array([[1]])).all()
    V = al.vandermonde([0, 1, INF], 3).T
    assert (V == al.rational_array([[1, 0, 0], [1, 1, 1], [0, 0, 1]])).all()
    Vi = al.inverse(V)
    assert (Vi == al.rational_array([[1, 0, 0], [-1, 1, -1], [0, 0, 1]])).all()
    assert al.nnz(Vi) == 5


@given(st.lists(small_q, min_size=1, max_size=6, unique=True), st.booleans())
def test_vandermonde_structure(nodes, with_inf):
    nodes = list(nodes) + ([INF] if with_inf else [])
    V = al.vandermonde(nodes, len(nodes))
    if with_inf:
        assert al.nnz(V[:, -1]) == 1 and V[-1, -1] == 1
        V = V[:, :-1]
    for l, x in enumerate(nodes[:V.shape[1]]):
        assert all(V[i, l] == x ** i for i in range(V.shape[0]))


def test_node_checks():
    with pytest.raises(ValueError):
        al.check_nodes([0, 1, 1])
    with pytest.raises(ValueError):
        al.check_nodes([0, INF, 1])
    with pytest.raises(ValueError):
        al.check_nodes([INF, INF])
    assert al.check_nodes(["0", "1/2", "inf"]) == [0, F(1, 2), INF]


def test_inverse_singular():
    with pytest.raises(al.SingularMatrixError):
        al.inverse(al.rational_array([[1, 2], [2, 4]]))


@given(st.integers(2, 5), st.data())
def test_inverse_roundtrip(n, data):
    M = al.rational_array([[data.draw(small_q) for _ in range(n)] for _ in range(n)])
    try:
        Mi = al.inverse(M)
    except al.SingularMatrixError:
        assert np.linalg.matrix_rank(al.to_numeric(M)) < n
        return
    assert (al.exact_matmul(M, Mi) == al.rational_eye(n)).all()


# -- remainder operator and Bezout -------------------------------------------------


def test_mod_operator_examples():
    assert (al.mod_operator(P(-1, 1), 1) == al.rational_array([[1, 1]])).all()
    assert (al.mod_operator(P(1, 0, 1), 3) == al.rational_array([[1, 0, -1, 0], [0, 1, 0, -1]])).all()
    assert (al.mod_operator(P(0, 0, 1), 1) == al.rational_eye(2)).all()
    with pytest.raises(ZeroDivisionError):
        al.mod_operator(Polynomial(), 2)


@given(st.lists(small_q, min_size=1, max_size=3), st.integers(0, 7), st.data(), st.sampled_from([1, 2, F(-1, 3)]))
def test_mod_operator_matches_divmod(low, d, data, lead):
    m = Polynomial(list(low) + [F(lead)])
    p = [data.draw(small_q) for _ in range(d + 1)]
    X = al.mod_operator(m, d)
    _, rho = al.poly_divmod(Polynomial(p), m)
    assert X.shape == (m.degree, d + 1)
    assert list(X.dot(al.rational_array(p))) == rho.padded(m.degree)


@pytest.mark.parametrize("M, m, N, n", [
    (P(0, 1), P(-1, 1), P(1), P(-1)),
    (P(-1, 1), P(1, 1), P(F(-1, 2)), P(F(1, 2))),
])
def test_bezout_examples(M, m, N, n):
    assert al.bezout_solve(M, m) == (N, n)


def test_bezout_not_coprime():
    with pytest.raises(al.NotCoprimeError):
        al.bezout_solve(P(0, 1), P(0, 0, 1))


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=6, unique=True), st.integers(1, 4))
def test_bezout_identity(roots, split):
    split = min(split, len(roots) - 1)
    M = Polynomial([F(1)])
    for x in roots[:split]:
        M = al.poly_mul(M, P(-x, 1))
    m = Polynomial([F(1)])
    for x in roots[split:]:
        m = al.poly_mul(m, P(-x, 1))
    N, n = al.bezout_solve(M, m)
    assert al.poly_mul(M, N) + al.poly_mul(m, n) == P(1)
    assert N.is_zero or N.degree <= m.degree - 1
    assert n.is_zero or n.degree <= M.degree - 1


# -- transforms ----------------------------------------------------------------


def test_dft_matrix():
    assert np.allclose(al.dft_matrix(2), [[1, 1], [1, -1]])
    assert al.dft_matrix(1).tolist() == [[1]]
    for n in [4, 17, 64]:
        D = al.dft_matrix(n)
        assert np.abs(D @ D.conj() / n - np.eye(n)).max() < 1e-13


def test_dct1_matrix():
    assert np.allclose(al.dct1_matrix(1), [[0.5, 0.5], [0.5, -0.5]])
    C = al.dct1_matrix(4)
    assert np.abs(C @ ((2 / 4) * C) - np.eye(5)).max() < 1e-12
    assert C[0].tolist() == [0.5, 1, 1, 1, 0.5]


# -- serialization ----------------------------------------------------------------


def test_matrix_json_roundtrip():
    R = al.rational_array([[1, "-2/3"], [0, 5]])
    js = al.matrix_to_json(R)
    assert js["entries"] == ["1/1", "-2/3", "0/1", "5/1"] and js["domain"] == "rational"
    assert (al.matrix_from_json(js) == R).all()
    Z = al.dft_matrix(3)
    assert np.array_equal(al.matrix_from_json(al.matrix_to_json(Z)), Z)
    X = np.array([[0.1, 2.0]])
    assert np.array_equal(al.matrix_from_json(al.matrix_to_json(X)), X)
