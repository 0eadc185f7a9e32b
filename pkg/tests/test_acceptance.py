"""Acceptance criteria 1-11. Each test records one PASS/FAIL line for the run summary."""
import numpy as np
import pytest

from conftest import record_criterion
from fastconv import accuracy as acc
from fastconv import adapters as ad
from fastconv import cost
from fastconv import fastexec as fx
from fastconv import generators as gen
from fastconv.bilinear import apply, apply_nd, interchange, validate

import oracles


def _check(num, title, failures, detail=""):
    record_criterion(num, title, not failures, "; ".join(failures[:6]) or detail)
    assert not failures, "\n".join(failures)


def _table(num, which, title, allow_annotated=False):
    rows = cost.table_report(which)
    bad = []
    for r in rows:
        if r.match or (allow_annotated and r.annotated):
            continue
        bad.append(f"{r.key}: " + ", ".join(r.mismatches()))
    notes = [f"{r.key} annotated: {r.mismatches()}" for r in rows if r.annotated and not r.match]
    _check(num, title, bad, "; ".join(notes))


def test_c01_toom_cost_table():
    _table(1, "2", "Toom-Cook cost table, n=2..9")


def test_c02_winograd_cost_table():
    rows = cost.table_report("3")
    assert [r.rank for r in rows] == [4, 6, 8, 10, 12, 14, 17, 20]
    _table(2, "3", "Winograd cost table, n=2..9", allow_annotated=True)


def test_c03_nested_cost_table():
    rows = cost.table_report("4")
    assert [r.rank for r in rows] == [9, 15, 21, 27, 25]
    _table(3, "4", "nested Toom cost table")


def _rational_algorithms():
    for r in range(1, 10):
        for n in range(1, 10):
            yield f"toom({r},{n})", gen.toom_cook(r, n)
    for r in range(1, 7):
        for n in range(1, 7):
            yield f"winograd({r},{n})", gen.winograd(r, n)
            yield f"direct({r},{n})", gen.fixed_algs("direct", r, n)
            yield f"corr({r},{n})", interchange(gen.toom_cook(r, n))
    for n in range(2, 10):
        yield f"winograd-table({n})", gen.winograd(n, n, gen.table3_divisors(n))
    for n in range(2, 7):
        yield f"chebyshev({n})", gen.toom_cook(n, n, gen.default_nodes(2 * n - 1, gen.CHEBYSHEV))
    yield "karatsuba", gen.fixed_algs("karatsuba")
    yield "sparse3", gen.fixed_algs("sparse3")
    for parts in [(2, 2), (2, 3), (2, 4), (2, 2, 2), (3, 3)]:
        yield f"nest{parts}", cost.nested_toom(parts)


def test_c04_tensor_validation():
    bad = []
    for name, alg in _rational_algorithms():
        assert alg.exact, name
        if validate(alg) != 0:
            bad.append(f"{name} residual {validate(alg)}")
    for n in range(1, 17):
        for name, alg in ((f"dft-cyclic({n})", gen.dft_cyclic_alg(n)), (f"dct({n})", gen.dct_linear_alg(n))):
            if not validate(alg) < 1e-12:
                bad.append(f"{name} residual {validate(alg):.2e}")
        for r in range(1, 5):
            if not validate(gen.dft_linear_alg(r, n)) < 1e-12:
                bad.append(f"dft-linear({r},{n})")
    _check(4, "CP residual: exact 0 rational, < 1e-12 DFT/DCT", bad)


def _generators_at(r, n):
    yield "toom_integer", gen.toom_cook(r, n), False
    yield "toom_chebyshev", gen.toom_cook(r, n, gen.default_nodes(n + r - 1, gen.CHEBYSHEV)), False
    yield "winograd", gen.winograd(r, n), False
    yield "dft_linear", gen.dft_linear_alg(r, n), True
    yield "direct", gen.fixed_algs("direct", r, n), False
    yield "correlation", interchange(gen.toom_cook(r, n)), False
    if r == n:
        yield "dct", gen.dct_linear_alg(n), False
        yield "dft_cyclic", gen.dft_cyclic_alg(n), True
    if r == n == 2:
        yield "karatsuba", gen.fixed_algs("karatsuba"), False
    if r == n == 3:
        yield "sparse3", gen.fixed_algs("sparse3"), False
    if r == n and n in acc.NESTINGS:
        yield "nested_toom", acc.build_generator(acc.NESTED_TOOM, n), False


def test_c05_oracle_equivalence():
    rng = np.random.default_rng(20240605)
    bad, worst = [], 0.0
    for r in range(1, 7):
        for n in range(1, 7):
            for name, alg, is_complex in _generators_at(r, n):
                v = alg.variant
                tol = 1e-9 if is_complex else 1e-10
                for _ in range(100):
                    f, g = rng.standard_normal(v.f_len), rng.standard_normal(v.g_len)
                    e = oracles.rel_err(apply(alg, f, g), fx.direct_conv(f, g, v))
                    worst = max(worst, e)
                    if not e < tol:
                        bad.append(f"{name}({r},{n}) {e:.2e}")
                        break
    _check(5, "random-input equivalence, r,n <= 6, 100 trials", bad, f"worst rel err {worst:.1e}")


@pytest.fixture(scope="module")
def accuracy_means():
    cfg = acc.ExperimentConfig(
        generators=acc.GENERATORS, dims=(2, 3), trials=10, base_seed=1,
        sizes={acc.TOOM_INTEGER: list(range(4, 10)), acc.TOOM_CHEBYSHEV: [7, 8, 9],
               acc.WINOGRAD: [7, 8, 9], acc.NESTED_TOOM: [8, 9]},
    )
    return acc.aggregate(acc.run_experiment(cfg))


def test_c06_accuracy_orderings(accuracy_means):
    m = accuracy_means
    bad = []
    ti = [m[(acc.TOOM_INTEGER, 3, n)] for n in range(4, 10)]
    if any(b < a for a, b in zip(ti, ti[1:])):
        bad.append(f"toom_integer d=3 not monotone: {['%.1e' % x for x in ti]}")
    for d, ns in ((2, (7, 8, 9)), (3, (7, 8))):
        for n in ns:
            w, c, t = (m[(g, d, n)] for g in (acc.WINOGRAD, acc.TOOM_CHEBYSHEV, acc.TOOM_INTEGER))
            if not w < c < t:
                bad.append(f"d={d} n={n}: winograd {w:.1e} chebyshev {c:.1e} integer {t:.1e}")
    for d in (2, 3):
        for n in (8, 9):
            if not m[(acc.NESTED_TOOM, d, n)] < m[(acc.TOOM_INTEGER, d, n)]:
                bad.append(f"nested d={d} n={n}")
    _check(6, "accuracy orderings over seeded trials", bad)


def _perturb(rng, x, eps):
    dx = rng.standard_normal(x.shape)
    return x + dx * (eps * np.linalg.norm(x) / np.linalg.norm(dx))


def _bound_cases(seed):
    rng = np.random.default_rng(seed)
    pool = [lambda n: gen.toom_cook(n, n),
            lambda n: gen.toom_cook(n, n, gen.default_nodes(2 * n - 1, gen.CHEBYSHEV)),
            lambda n: gen.winograd(n, n, gen.table3_divisors(n)) if n > 1 else gen.trivial()]
    for i in range(20):
        n = int(rng.integers(1, 6))
        yield pool[i % 3](n), float(rng.choice([1e-8, 1e-6])), rng


def test_c07_error_bounds():
    bad, ratios = [], []
    for variant, d, seed in (("single", 1, 71), ("mode-wise", 2, 72), ("mode-wise", 3, 73), ("overlap", 2, 74)):
        for alg, eps, rng in _bound_cases(seed):
            n = alg.variant.n
            if variant == "overlap":
                nest = ad.overlap_add_nest(alg, alg)
                f, g = rng.random(n * n), rng.random(n * n)
                y = apply(nest, _perturb(rng, f, eps), _perturb(rng, g, eps))
                ref = oracles.linear(f, g)
            else:
                f, g = rng.random((n,) * d), rng.random((n,) * d)
                y = apply_nd(alg, _perturb(rng, f, eps), _perturb(rng, g, eps))
                ref = fx.direct_conv_nd(f, g)
            err = np.linalg.norm(np.ravel(y - ref))
            b = acc.error_bound(alg, np.linalg.norm(f), np.linalg.norm(g), eps, d=d, overlap=variant == "overlap")
            ratios.append(err / b.value)
            if not err <= 1.1 * b.value:
                bad.append(f"{variant} d={d} n={n} eps={eps}: {err:.2e} > 1.1*{b.value:.2e}")
    _check(7, "perturbation error within bound (80 cases)", bad, f"max err/bound {max(ratios):.2f}")


def test_c08_fft_counts():
    bad = []
    for n in (2, 4, 8, 16):
        x = np.random.default_rng(n).standard_normal(n) + 1j * np.random.default_rng(n + 100).standard_normal(n)
        y, c = fx.fft_counted(x)
        ref = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) @ x
        if not np.linalg.norm(y - ref) / np.linalg.norm(ref) < 1e-12:
            bad.append(f"n={n} fft inaccurate")
        if not np.linalg.norm(fx.fft(x) - ref) / np.linalg.norm(ref) < 1e-12:
            bad.append(f"n={n} fft inaccurate")
        if c.as_tuple() != cost.fft_cost(n):
            bad.append(f"n={n} counted {c.as_tuple()} vs closed form {cost.fft_cost(n)}")
    _check(8, "instrumented FFT counts equal closed form", bad)


def test_c09_hankel_ratio():
    bad = []
    counts = {}
    for n in (8, 16, 32, 64, 128):
        c = fx.OpCounter()
        rng = np.random.default_rng(n)
        f, g = rng.random(n), rng.random(n)
        y = fx.hankel_sym_conv(f, g, threshold=4, counter=c)
        if not oracles.rel_err(y, np.convolve(f, g)) < 1e-10:
            bad.append(f"n={n} wrong result")
        counts[n] = c.mults
    for n in (8, 16, 32, 64):
        if counts[2 * n] != 3 * counts[n]:
            bad.append(f"count({2 * n})={counts[2 * n]} vs 3*count({n})={3 * counts[n]}")
    _check(9, "Hankel multiplication count triples per doubling", bad,
           " ".join(f"{n}:{c}" for n, c in counts.items()))


def test_c10_cnn_identity():
    rng = np.random.default_rng(10)
    bad = []
    for _ in range(50):
        m, r = (int(x) for x in rng.integers(1, 4, 2))
        dims = cost.CnnLayerDims(
            N=int(rng.integers(1, 5)), K=int(rng.integers(1, 6)), H=int(rng.integers(1, 6)), m=m, r=r,
            D_H=m * int(rng.integers(1, 4)), D_W=m * int(rng.integers(1, 4)))
        out = cost.cnn_layer_cost(dims, interchange(gen.toom_cook(r, m)))
        if out["total"] != out["lavin_form_total"]:
            bad.append(f"N={dims.N}: breakdown {out['total']} vs closed form {out['lavin_form_total']}")
    _check(10, f"CNN breakdown equals closed form ({50 - len(bad)}/50 tuples)", bad)


def test_c11_compositions():
    rng = np.random.default_rng(11)
    bad = []

    def check(name, y, ref):
        e = oracles.rel_err(y, ref)
        if not e < 1e-10:
            bad.append(f"{name} {e:.1e}")

    for parts in [(2, 2), (2, 4), (2, 2, 2)]:
        alg = cost.nested_toom(parts)
        for _ in range(20):
            f, g = rng.standard_normal(alg.variant.r), rng.standard_normal(alg.variant.n)
            check(f"overlap{parts}", apply(alg, f, g), oracles.linear(f, g))
    for n1, n2 in [(2, 3), (3, 4), (3, 5)]:
        alg = ad.agarwal_cooley_nest(gen.dft_cyclic_alg(n1), gen.dft_cyclic_alg(n2))
        for _ in range(20):
            f, g = rng.standard_normal(n1 * n2), rng.standard_normal(n1 * n2)
            check(f"agarwal-cooley({n1},{n2})", apply(alg, f, g), oracles.cyclic(f, g))
    for r in range(1, 5):
        for n in range(1, 21):
            f, g = rng.standard_normal(r), rng.standard_normal(n)
            check(f"small-filter({r},{n})", ad.small_filter_conv(f, g, gen.toom_cook(r, r)), oracles.linear(f, g))
    for n in range(1, 7):
        alg = gen.toom_cook(n, n)
        for k in range(1, 4):
            Fk = ad.RankFactors2D(rng.standard_normal(k), rng.standard_normal((n, k)), rng.standard_normal((n, k)))
            Gk = ad.RankFactors2D(rng.standard_normal(k), rng.standard_normal((n, k)), rng.standard_normal((n, k)))
            check(f"low-rank(n={n},k={k})", ad.low_rank_conv2d(Fk, Gk, alg),
                  oracles.linear_nd(Fk.matrix(), Gk.matrix()))
    _check(11, "composition adapters match oracles", bad)
