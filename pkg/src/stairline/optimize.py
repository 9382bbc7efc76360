"""Box-constrained global maximization.

Four engines share one entry point, :func:`maximize`:

* ``de`` -- differential evolution, rand/1/bin with dithered weight;
* ``nelder_mead`` -- multistart simplex search from Latin-hypercube starts;
* ``simulated_annealing`` -- single-chain annealing with re-annealing;
* ``random_search`` -- uniform sampling of the box.

Every random draw comes from a stream keyed by ``(seed, block)`` so results
do not depend on how objective evaluations are spread over threads.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .diagonal import diag3_catalog
from .errors import BudgetError, DimensionError, NonFiniteObjective
from .grid import enumerate_types, fsl_objective_batch, grid_objective

METHODS = ("de", "nelder_mead", "simulated_annealing", "random_search")

THREADS_ENV = "STAIRLINE_THREADS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class OptProblem:
    """Maximize ``evaluator`` over the box ``bounds``.

    ``batch_evaluator`` (optional) maps an ``(n, n_vars)`` array to ``n``
    values and must agree with ``evaluator`` row by row.
    """

    evaluator: Callable
    bounds: Sequence
    batch_evaluator: Optional[Callable] = None

    def __post_init__(self):
        self.bounds = [(float(lo), float(hi)) for lo, hi in self.bounds]
        if not self.bounds:
            raise DimensionError("a problem needs at least one variable")
        for lo, hi in self.bounds:
            if not lo <= hi:
                raise DimensionError(f"empty interval [{lo}, {hi}]")

    @property
    def n_vars(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    @classmethod
    def from_spec(cls, spec) -> "OptProblem":
        return cls(spec.evaluator, spec.bounds, getattr(spec, "batch_evaluator", None))


@dataclass
class OptResult:
    value: float
    argmax: np.ndarray
    evaluations: int
    method: str
    seed: int
    wall_time: float
    trace: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": [float(v) for v in self.argmax],
            "evaluations": self.evaluations,
            "method": self.method,
            "seed": self.seed,
            "wall_ms": self.wall_time,
        }


class _Counter:
    """Evaluation bookkeeping: budget, best point, best-so-far trace."""

    def __init__(self, problem: OptProblem, budget: int, workers: int):
        self.problem = problem
        self.budget = budget
        self.workers = workers
        self.evals = 0
        self.best_value = -math.inf
        self.best_x = None
        self.trace = []

    @property
    def remaining(self) -> int:
        return self.budget - self.evals

    def _raw_batch(self, X: np.ndarray) -> np.ndarray:
        pb = self.problem
        if pb.batch_evaluator is None:
            return np.array([pb.evaluator(x) for x in X], dtype=float)
        if self.workers <= 1 or len(X) < 2 * self.workers:
            return np.asarray(pb.batch_evaluator(X), dtype=float)
        chunks = np.array_split(X, self.workers)
        with ThreadPoolExecutor(self.workers) as ex:
            parts = list(ex.map(pb.batch_evaluator, chunks))
        return np.concatenate([np.asarray(c, dtype=float) for c in parts])

    def batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        vals = self._raw_batch(X)
        if not np.all(np.isfinite(vals)):
            bad = X[~np.isfinite(vals)][0]
            raise NonFiniteObjective(f"objective returned a non-finite value at {bad.tolist()}")
        self.evals += len(X)
        i = int(np.argmax(vals))
        if vals[i] > self.best_value:
            self.best_value = float(vals[i])
            self.best_x = X[i].copy()
        self.trace.append((self.evals, self.best_value))
        return vals

    def one(self, x: np.ndarray) -> float:
        v = float(self.problem.evaluator(x))
        if not math.isfinite(v):
            raise NonFiniteObjective(f"objective returned a non-finite value at {list(x)}")
        self.evals += 1
        if v > self.best_value:
            self.best_value = v
            self.best_x = np.array(x, dtype=float)
            self.trace.append((self.evals, v))
        return v


def reflect_into_box(X: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold coordinates back into ``[lo, hi]`` by mirror reflection."""
    w = hi - lo
    safe = np.where(w > 0, w, 1.0)
    y = np.mod(X - lo, 2 * safe)
    y = np.where(y > safe, 2 * safe - y, y)
    return np.where(w > 0, lo + y, lo)


def latin_hypercube(rng: np.random.Generator, n: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    k = len(lo)
    u = (rng.permuted(np.tile(np.arange(n), (k, 1)), axis=1).T + rng.random((n, k))) / n
    return lo + u * (hi - lo)


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *key]))


def _three_distinct(rng: np.random.Generator, n: int) -> np.ndarray:
    """Per row i, three distinct indices in ``range(n)`` all different from i."""
    idx = np.arange(n)
    r = rng.integers(0, n, size=(n, 3))
    while True:
        bad = (
            (r[:, 0] == idx) | (r[:, 1] == idx) | (r[:, 2] == idx)
            | (r[:, 0] == r[:, 1]) | (r[:, 0] == r[:, 2]) | (r[:, 1] == r[:, 2])
        )
        if not bad.any():
            return r
        r[bad] = rng.integers(0, n, size=(int(bad.sum()), 3))


def _de(problem, seed, budget, counter, *, pop_factor=20, cr=0.9, weight=(0.5, 1.0),
        stall_generations=200, tol=1e-12):
    n = problem.n_vars
    npop = pop_factor * n
    if budget < npop:
        raise BudgetError(f"budget {budget} below population size {npop}")
    lo, hi = problem.lower, problem.upper
    pop = latin_hypercube(_stream(seed, 0), npop, lo, hi)
    fit = counter.batch(pop)
    stall, mark, gen = 0, counter.best_value, 0
    while counter.remaining > 0 and stall < stall_generations:
        gen += 1
        rng = _stream(seed, 1, gen)
        f = rng.uniform(*weight)
        r = _three_distinct(rng, npop)
        mutant = pop[r[:, 0]] + f * (pop[r[:, 1]] - pop[r[:, 2]])
        cross = rng.random((npop, n)) < cr
        cross[np.arange(npop), rng.integers(0, n, npop)] = True
        trial = reflect_into_box(np.where(cross, mutant, pop), lo, hi)
        m = min(npop, counter.remaining)
        tf = counter.batch(trial[:m])
        better = tf >= fit[:m]
        pop[:m][better] = trial[:m][better]
        fit[:m][better] = tf[better]
        if counter.best_value > mark + tol:
            mark, stall = counter.best_value, 0
        else:
            stall += 1


def _nelder_mead(problem, seed, budget, counter, *, starts=64):
    if budget < starts:
        raise BudgetError(f"budget {budget} below the {starts} multistart runs")
    lo, hi = problem.lower, problem.upper
    x0s = latin_hypercube(_stream(seed, 0), starts, lo, hi)
    per_start = budget // starts

    def neg(x):
        return -counter.one(np.clip(x, lo, hi))

    for x0 in x0s:
        allowed = min(per_start, counter.remaining)
        if allowed <= 0:
            break
        minimize(
            neg, x0, method="Nelder-Mead", bounds=list(zip(lo, hi)),
            options={"maxfev": allowed, "xatol": 1e-11, "fatol": 1e-16, "adaptive": True},
        )


def _annealing(problem, seed, budget, counter, *, cooling=0.995, step=0.1, stall_steps=2000):
    rng = _stream(seed, 0)
    lo, hi = problem.lower, problem.upper
    width = hi - lo
    probe = lo + rng.random((min(100, budget), len(lo))) * width
    vals = counter.batch(probe)
    spread = float(np.std(vals))
    t0 = spread if spread > 0 else max(float(np.max(np.abs(vals))), 1e-12)
    x = counter.best_x.copy()
    fx = counter.best_value
    temp, stall, mark = t0, 0, counter.best_value
    while counter.remaining > 0:
        scale = step * width * math.sqrt(max(temp / t0, 1e-8))
        cand = reflect_into_box(x + scale * rng.standard_normal(len(x)), lo, hi)
        fc = counter.one(cand)
        if fc >= fx or rng.random() < math.exp((fc - fx) / temp):
            x, fx = cand, fc
        temp *= cooling
        if counter.best_value > mark:
            mark, stall = counter.best_value, 0
        else:
            stall += 1
        if stall >= stall_steps:
            temp, stall = t0, 0
            x, fx = counter.best_x.copy(), counter.best_value


def _random_search(problem, seed, budget, counter, *, block=10_000):
    lo, hi = problem.lower, problem.upper
    b = 0
    while counter.remaining > 0:
        m = min(block, counter.remaining)
        X = lo + _stream(seed, b).random((m, len(lo))) * (hi - lo)
        counter.batch(X)
        b += 1


_ENGINES = {
    "de": _de,
    "nelder_mead": _nelder_mead,
    "simulated_annealing": _annealing,
    "random_search": _random_search,
}


def maximize(problem: OptProblem, method: str = "de", seed: int = 0, budget: int = 200_000,
             workers: Optional[int] = None, **options) -> OptResult:
    """Best point of ``problem`` found by ``method`` within ``budget`` evaluations.

    Deterministic in ``(method, seed, budget)``; ``workers`` only spreads
    batch evaluations over threads.  The reported value is the best over
    every evaluation made.
    """
    if method not in _ENGINES:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if budget < 1:
        raise BudgetError("budget must be positive")
    workers = default_workers() if workers is None else max(1, int(workers))
    counter = _Counter(problem, int(budget), workers)
    t0 = time.perf_counter()
    _ENGINES[method](problem, seed, int(budget), counter, **options)
    wall = (time.perf_counter() - t0) * 1000.0
    return OptResult(counter.best_value, counter.best_x, counter.evals, method, seed, wall, counter.trace)


def refine_maximum(evaluator: Callable, x0: Sequence[float], dps: int = 40, max_iter: int = 50):
    """Polish an interior maximum with Newton steps at extended precision.

    ``evaluator`` must accept ``mpmath.mpf`` coordinates.  Derivatives come
    from central differences at the working precision.  Returns the
    refined point and value as ``mpf``.
    """
    import mpmath

    with mpmath.workdps(dps):
        x = mpmath.matrix([mpmath.mpf(float(v)) for v in x0])
        n = len(x)
        h = mpmath.mpf(10) ** (-(dps // 3))

        def f(v):
            return evaluator([v[i] for i in range(n)])

        def shifted(v, i, si, j=None, sj=0):
            w = v.copy()
            w[i] += si * h
            if j is not None:
                w[j] += sj * h
            return w

        for _ in range(max_iter):
            g = mpmath.matrix(n, 1)
            H = mpmath.matrix(n, n)
            for i in range(n):
                g[i] = (f(shifted(x, i, 1)) - f(shifted(x, i, -1))) / (2 * h)
                for j in range(i, n):
                    if i == j:
                        H[i, i] = (f(shifted(x, i, 1)) - 2 * f(x) + f(shifted(x, i, -1))) / h**2
                    else:
                        H[i, j] = H[j, i] = (
                            f(shifted(x, i, 1, j, 1)) - f(shifted(x, i, 1, j, -1))
                            - f(shifted(x, i, -1, j, 1)) + f(shifted(x, i, -1, j, -1))
                        ) / (4 * h**2)
            step = mpmath.lu_solve(H, g)
            x = x - step
            if mpmath.norm(step) < mpmath.mpf(10) ** (-(dps // 2)):
                break
        return [x[i] for i in range(n)], f(x)


FAMILIES = ("grid", "diag3", "fsl")


def default_budget(family: str, d: int) -> int:
    return 2_000_000 if family == "grid" and d >= 6 else 200_000


@dataclass
class SweepRow:
    label: str
    result: OptResult
    q: tuple
    p: tuple


@dataclass
class Sweep:
    family: str
    dim: int
    rows: list

    @property
    def best(self) -> SweepRow:
        return max(self.rows, key=lambda r: r.result.value)

    def argbest(self, tol: float = 1e-9) -> list:
        """Labels whose value is within ``tol`` of the overall maximum."""
        top = self.best.result.value
        return [r.label for r in self.rows if r.result.value >= top - tol]


def fsl_problem(d: int) -> OptProblem:
    """Box problem for the product of type-region volumes over ``[0,1]^d``."""
    return OptProblem(lambda a: float(fsl_objective_batch(np.asarray([a]))[0]),
                      [(0.0, 1.0)] * d, fsl_objective_batch)


def maximize_all_types(d: int, family: str = "grid", method: str = "de", seed: int = 0,
                       budget: Optional[int] = None, workers: Optional[int] = None,
                       allow_high_dim: bool = False) -> Sweep:
    """Maximize every objective of a family: one row per path type or catalog entry."""
    if family not in ("grid", "diag3"):
        raise ValueError(f"family {family!r} has no type sweep")
    if family == "diag3" and d != 3:
        raise DimensionError("the diagonal catalog exists for d = 3 only")
    if family == "grid" and (d < 3 or (d > 6 and not allow_high_dim)):
        raise DimensionError("grid sweeps cover 3 <= d <= 6 (pass allow_high_dim for more)")
    budget = default_budget(family, d) if budget is None else budget
    rows = []
    if family == "grid":
        for T in enumerate_types(d):
            spec = grid_objective(d, T)
            res = maximize(OptProblem.from_spec(spec), method, seed, budget, workers)
            q, p = spec.points(res.argmax)
            rows.append(SweepRow(T.label(), res, q, p))
    else:
        for f in diag3_catalog():
            pb = OptProblem(f.evaluate, f.bounds, f.evaluate_batch)
            res = maximize(pb, method, seed, budget, workers)
            q, p = f.points(res.argmax)
            rows.append(SweepRow(f"F{f.id}", res, q, p))
    return Sweep(family, d, rows)
