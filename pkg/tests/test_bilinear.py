import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastconv import algebra as al
from fastconv import generators as gen
from fastconv.bilinear import (
    BilinearAlgorithm,
    ConvVariant,
    ImaginaryResidualWarning,
    ValidationError,
    apply,
    apply_2d,
    apply_exact,
    apply_nd,
    conv_tensor,
    interchange,
    kron_nest,
    validate,
)

import oracles

KARA = gen.fixed_algs("karatsuba")


def test_variant_sizes():
    v = ConvVariant.correlation(2, 3)
    assert (v.f_len, v.g_len, v.out_len) == (2, 4, 3)
    assert ConvVariant.linear(2, 3).out_len == 4
    assert ConvVariant.cyclic(5).out_len == 5


def test_conv_tensor_examples():
    T = conv_tensor(ConvVariant.linear(2, 2))
    ones = {tuple(i) for i in np.argwhere(T)}
    assert ones == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 2)}
    assert conv_tensor(ConvVariant.cyclic(2))[1, 1, 0] == 1
    Tc = conv_tensor(ConvVariant.correlation(2, 2))
    for i, j, k in np.ndindex(Tc.shape):
        assert Tc[i, j, k] == (j == i + k)


def test_validate_karatsuba_and_perturbed():
    assert validate(KARA) == 0
    C = KARA.C.copy()
    C[1, 1] = -C[1, 1]
    bad = BilinearAlgorithm(KARA.A, KARA.B, C, KARA.variant)
    assert validate(bad) >= 1
    with pytest.raises(ValidationError):
        validate(bad, tol=0.5)


def test_validate_dft():
    assert validate(gen.dft_cyclic_alg(4)) < 1e-13


def test_shape_checks():
    with pytest.raises(ValueError):
        BilinearAlgorithm(KARA.A, KARA.B, KARA.C[:2], KARA.variant)
    with pytest.raises(ValueError):
        BilinearAlgorithm(KARA.A[:, :2], KARA.B[:, :2], KARA.C[:, :2], KARA.variant)
    with pytest.raises(ValueError):
        apply(KARA, [1, 2, 3], [1, 2])


def test_apply_examples():
    assert np.allclose(apply(KARA, [1, 2], [3, 4]), [3, 10, 8])
    assert not apply(KARA, [0, 0], [3, 4]).any()
    assert np.allclose(apply(gen.dft_cyclic_alg(2), [1, 2], [3, 4]), [11, 10], atol=1e-12)
    assert list(apply_exact(KARA, [1, 2], [3, 4])) == [3, 10, 8]


def test_complex_residual_warning():
    A = np.array([[1.0 + 1e-6j]])
    alg = BilinearAlgorithm(A, np.ones((1, 1)), np.ones((1, 1)), ConvVariant.linear(1, 1))
    with pytest.warns(ImaginaryResidualWarning):
        y = apply(alg, [1.0], [1.0])
    assert y.dtype == float
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        apply(gen.dft_cyclic_alg(4), np.ones(4), np.arange(4.0))


def test_interchange():
    corr = interchange(KARA)
    assert corr.variant == ConvVariant.correlation(2, 2)
    assert np.allclose(apply(corr, [1, 2], [3, 4, 5]), [11, 14])
    assert corr.rank == KARA.rank and validate(corr) == 0
    back = interchange(corr)
    assert back.variant == KARA.variant
    assert all((x == y).all() for x, y in zip((back.A, back.B, back.C), (KARA.A, KARA.B, KARA.C)))
    with pytest.raises(ValueError):
        interchange(gen.dft_cyclic_alg(3))


@given(st.integers(1, 5), st.integers(1, 5))
def test_interchange_gives_correlation(r, n):
    corr = interchange(gen.toom_cook(r, n))
    assert validate(corr) == 0
    rng = np.random.default_rng(r * 10 + n)
    f, g = rng.random(r), rng.random(n + r - 1)
    assert oracles.rel_err(apply(corr, f, g), oracles.correlation(f, g)) < 1e-10


def test_kron_nest_examples():
    t2, t3 = gen.toom_cook(2, 2), gen.toom_cook(3, 3)
    k = kron_nest(t2, t2)
    assert k.rank == 9 and al.nnz(k.A) == 16 and al.nnz(k.C) == 25
    assert kron_nest(t2, t3).rank == 15
    triv = gen.trivial()
    kt = kron_nest(t2, triv)
    assert (kt.A == t2.A).all() and (kt.C == t2.C).all()
    with pytest.raises(ValueError):
        kron_nest(t2, gen.dft_cyclic_alg(2))


@given(st.sampled_from([(2, 2), (2, 3), (3, 2), (1, 3)]))
def test_kron_nest_nnz_products(shape):
    a, b = (gen.toom_cook(s, s) for s in shape)
    k = kron_nest(a, b)
    assert k.rank == a.rank * b.rank
    for X, Y, Z in ((a.A, b.A, k.A), (a.B, b.B, k.B), (a.C, b.C, k.C)):
        assert al.nnz(Z) == al.nnz(X) * al.nnz(Y)
    assert validate(k) == 0


def test_apply_2d():
    F = np.eye(2)
    G = np.ones((2, 2))
    assert np.allclose(apply_2d(KARA, F, G), oracles.linear_nd(F, G))
    assert np.allclose(apply_2d(gen.trivial(), [[2.0]], [[3.0]]), [[6.0]])


@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_apply_2d_matches_kron_path(n, seed):
    alg = gen.toom_cook(n, n)
    rng = np.random.default_rng(seed)
    F, G = rng.random((n, n)), rng.random((n, n))
    Y = apply_2d(alg, F, G)
    vec = apply(kron_nest(alg, alg), F.ravel(), G.ravel()).reshape(2 * n - 1, 2 * n - 1)
    assert np.abs(Y - vec).max() < 1e-12 * max(1, np.abs(Y).max())
    assert oracles.rel_err(Y, oracles.linear_nd(F, G)) < 1e-10


def test_apply_nd():
    rng = np.random.default_rng(3)
    f, g = rng.random(2), rng.random(2)
    assert np.allclose(apply_nd(KARA, f, g), apply(KARA, f, g))
    F, G = rng.random((2,) * 3), rng.random((2,) * 3)
    assert oracles.rel_err(apply_nd(KARA, F, G), oracles.linear_nd(F, G)) < 1e-12
    imp = np.zeros((2, 2, 2))
    imp[0, 0, 0] = 1
    Y = apply_nd(KARA, imp, G)
    assert np.allclose(Y[:2, :2, :2], G) and np.allclose(Y.sum(), G.sum())
    with pytest.raises(ValueError):
        apply_nd(KARA, np.ones((2,) * 5), np.ones((2,) * 5))


def test_json_roundtrip_and_schema():
    for alg in (KARA, gen.dft_cyclic_alg(3), gen.dct_linear_alg(2), kron_nest(KARA, KARA)):
        js = json.loads(json.dumps(alg.to_json()))
        assert {"variant", "r", "n", "out", "rank", "provenance", "A", "B", "C"} <= set(js)
        back = BilinearAlgorithm.from_json(js)
        assert back.variant == alg.variant and back.rank == alg.rank
        for X, Y in zip(back.numeric, alg.numeric):
            assert np.array_equal(X, Y)
        assert back.exact == alg.exact
