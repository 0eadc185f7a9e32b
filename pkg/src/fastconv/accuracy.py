"""Error bounds for bilinear algorithms and the random-input accuracy harness."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, asdict
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import algebra
from .bilinear import BilinearAlgorithm, apply_nd
from .fastexec import direct_conv_nd

UNIT_ROUNDOFF = 2.0 ** -53


# ---------------------------------------------------------------------------
# norms and bounds


@dataclass(frozen=True)
class NormResult:
    value: float
    converged: bool


def spectral_norm_info(M, rtol: float = 1e-10, max_iter: int = 1000) -> NormResult:
    """Largest singular value by power iteration on ``M^H M``.

    If the iteration does not settle within ``max_iter`` steps the Frobenius
    norm (always an upper bound) is returned with ``converged=False``.
    """
    M = algebra.to_numeric(M)
    if M.size == 0 or not np.any(M):
        return NormResult(0.0, True)
    v = np.ones(M.shape[1], dtype=np.result_type(M, float))
    # a fixed, non-symmetric start avoids orthogonality to the top vector
    v += np.linspace(0.1, 0.2, v.size)
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        w = M.conj().T @ (M @ v)
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            break
        v = w / lam
        if abs(lam - prev) <= rtol * lam:
            return NormResult(float(np.sqrt(lam)), True)
        prev = lam
    return NormResult(float(np.linalg.norm(M)), False)


def spectral_norm(M, rtol: float = 1e-10, max_iter: int = 1000) -> float:
    return spectral_norm_info(M, rtol, max_iter).value


@dataclass(frozen=True)
class ErrorBound:
    value: float
    norm_A: float
    norm_B: float
    norm_C: float
    f_norm: float
    g_norm: float
    eps: float
    d: int
    overlap: bool = False
    first_order: bool = True
    model: str = "input perturbation"


def error_bound(alg: BilinearAlgorithm, f_norm: float, g_norm: float, eps: float = UNIT_ROUNDOFF,
                d: int = 1, overlap: bool = False) -> ErrorBound:
    """First-order bound on ``||dy||`` for relative input perturbations of size ``eps``.

    ``alg`` is the 1-d algorithm. With ``d > 1`` it is applied mode by mode to
    order-``d`` tensors; with ``overlap=True`` it is nested ``d`` times by
    overlap-add, which costs an extra factor ``2^(d/2)``.
    """
    if eps <= 0 or d < 1:
        raise ValueError("error_bound needs eps > 0 and d >= 1")
    nA, nB, nC = (spectral_norm(M) for M in (alg.A, alg.B, alg.C))
    coef = 2.0 * (2.0 ** (d / 2) if overlap else 1.0)
    val = coef * (nA * nB * nC) ** d * f_norm * g_norm * eps
    model = "heuristic roundoff model" if eps == UNIT_ROUNDOFF else "input perturbation"
    return ErrorBound(val, nA, nB, nC, f_norm, g_norm, eps, d, overlap, True, model)


# ---------------------------------------------------------------------------
# experiment harness

TOOM_INTEGER = "toom_integer"
TOOM_CHEBYSHEV = "toom_chebyshev"
WINOGRAD = "winograd"
NESTED_TOOM = "nested_toom"
GENERATORS = (TOOM_INTEGER, TOOM_CHEBYSHEV, WINOGRAD, NESTED_TOOM)

NESTINGS = {4: (2, 2), 6: (2, 3), 8: (2, 2, 2), 9: (3, 3)}


class InapplicableError(ValueError):
    """The generator has no construction for the requested size."""


@lru_cache(maxsize=None)
def build_generator(name: str, n: int) -> BilinearAlgorithm:
    from . import generators as gen
    from .cost import nested_toom

    if name == TOOM_INTEGER:
        return gen.toom_cook(n, n)
    if name == TOOM_CHEBYSHEV:
        return gen.toom_cook(n, n, gen.default_nodes(2 * n - 1, gen.CHEBYSHEV))
    if name == WINOGRAD:
        try:
            return gen.winograd(n, n, gen.table3_divisors(n))
        except gen.GenerationError as exc:
            raise InapplicableError(f"{name}: {exc}") from None
    if name == NESTED_TOOM:
        if n not in NESTINGS:
            raise InapplicableError(f"{name}: no nesting for n={n}")
        return nested_toom(NESTINGS[n])
    raise InapplicableError(f"unknown generator {name!r}")


@dataclass(frozen=True)
class AccuracyRecord:
    generator: str
    d: int
    n: int
    trial: int
    seed: int
    rel_err: float


@dataclass
class ExperimentConfig:
    generators: Sequence[str] = GENERATORS
    dims: Sequence[int] = (1, 2, 3)
    sizes: Sequence[int] | dict = tuple(range(2, 10))
    trials: int = 10
    base_seed: int = 1
    skip_inapplicable: bool = True
    workers: int = 1

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        known = {k: obj[k] for k in obj if k in cls.__dataclass_fields__}
        unknown = set(obj) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def sizes_for(self, generator: str) -> list[int]:
        if isinstance(self.sizes, dict):
            return list(self.sizes.get(generator, []))
        return list(self.sizes)


def trial_seed(base_seed: int, d: int, n: int, trial: int) -> int:
    """64-bit seed for one input pair; independent of the generator so all share inputs."""
    ss = np.random.SeedSequence([base_seed, d, n, trial])
    return int(ss.generate_state(1, np.uint64)[0])


def trial_inputs(seed: int, d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    shape = (n,) * d
    return rng.random(shape), rng.random(shape)


def relative_error(y, ref) -> float:
    return float(np.linalg.norm(np.ravel(y - ref)) / np.linalg.norm(np.ravel(ref)))


def _run_cell(args):
    d, n, trial, seed, gens = args
    F, G = trial_inputs(seed, d, n)
    ref = direct_conv_nd(F, G)
    out = []
    for name in gens:
        y = apply_nd(build_generator(name, n), F, G)
        out.append(AccuracyRecord(name, d, n, trial, seed, relative_error(y, ref)))
    return out


def run_experiment(config: ExperimentConfig | dict) -> list[AccuracyRecord]:
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    # resolve which generators run at which n, failing early if asked to
    plan: dict[int, list[str]] = {}
    for name in config.generators:
        for n in config.sizes_for(name):
            try:
                build_generator(name, n)
            except InapplicableError:
                if not config.skip_inapplicable:
                    raise
                continue
            plan.setdefault(n, []).append(name)
    cells = []
    for d in config.dims:
        if not 1 <= d <= 4:
            raise ValueError(f"dimension {d} outside 1..4")
        for n in sorted(plan):
            for t in range(config.trials):
                cells.append((d, n, t, trial_seed(config.base_seed, d, n, t), tuple(plan[n])))
    if config.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(config.workers) as ex:
            results = list(ex.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    records = [r for cell in results for r in cell]
    records.sort(key=lambda r: (config.generators.index(r.generator), r.d, r.n, r.trial))
    return records


def aggregate(records: Iterable[AccuracyRecord]) -> dict[tuple[str, int, int], float]:
    sums: dict = {}
    for r in records:
        s = sums.setdefault((r.generator, r.d, r.n), [0.0, 0])
        s[0] += r.rel_err
        s[1] += 1
    return {k: v[0] / v[1] for k, v in sums.items()}


def records_csv(records: Iterable[AccuracyRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generator", "d", "n", "trial", "seed", "rel_err"])
    for r in records:
        w.writerow([r.generator, r.d, r.n, r.trial, r.seed, repr(r.rel_err)])
    return buf.getvalue()


def aggregate_csv(means: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generator", "d", "n", "mean_rel_err"])
    for (g, d, n), v in means.items():
        w.writerow([g, d, n, repr(v)])
    return buf.getvalue()


__all__ = [
    "UNIT_ROUNDOFF", "NormResult", "spectral_norm", "spectral_norm_info", "ErrorBound", "error_bound",
    "GENERATORS", "NESTINGS", "InapplicableError", "build_generator", "AccuracyRecord", "ExperimentConfig",
    "trial_seed", "trial_inputs", "relative_error", "run_experiment", "aggregate", "records_csv",
    "aggregate_csv",
]
