"""Stabbing probabilities for the stretched grid.

``recfsg(q, p)`` is the probability that a stair-simplex spanned by ``d``
independent uniform points of ``[0,1]^d`` meets the stair-path between
``q`` and ``p``.  Dividing by ``d!`` gives the leading constant of the
number of grid simplices a line near ``qp`` stabs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .staircore import as_point, type_region_volumes


def _check_unit(*points) -> None:
    for pt in points:
        for x in pt:
            if not (0 <= x <= 1):
                raise DomainError(f"coordinate {x!r} outside [0, 1]")


def recfsg(q: Sequence, p: Sequence, *, check: bool = True):
    """Stabbing probability of the stair-path ``qp`` in ``[0,1]^d``.

    Generic in the number type: floats, ``Fraction`` and ``mpmath.mpf``
    inputs give results of the same type.
    """
    q, p = as_point(q), as_point(p)
    if len(q) != len(p):
        raise DimensionError("q and p differ in dimension")
    if check:
        _check_unit(q, p)
    d = len(q)
    r = abs(q[0] - p[0])
    for k in range(2, d + 1):
        if p[k - 1] >= q[k - 1]:
            x, y = p, q
        else:
            x, y = q, p
        prod = 1
        for i in range(1, k):
            prod = prod * y[i - 1] ** i * (1 - y[i - 1])
        xk, yk = x[k - 1], y[k - 1]
        r = math.factorial(k) * (xk**k - yk**k) * prod + k * (1 - xk) * xk ** (k - 1) * r
    return r


def recfsg_batch(Q: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Vectorized :func:`recfsg` over rows of ``Q`` and ``P`` (shape ``(n, d)``)."""
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    d = Q.shape[1]
    r = np.abs(Q[:, 0] - P[:, 0])
    for k in range(2, d + 1):
        p_high = P[:, k - 1] >= Q[:, k - 1]
        X = np.where(p_high[:, None], P[:, :k], Q[:, :k])
        Y = np.where(p_high[:, None], Q[:, :k], P[:, :k])
        prod = np.ones(len(Q))
        for i in range(1, k):
            yi = Y[:, i - 1]
            prod *= yi**i * (1 - yi)
        xk, yk = X[:, k - 1], Y[:, k - 1]
        r = math.factorial(k) * (xk**k - yk**k) * prod + k * (1 - xk) * xk ** (k - 1) * r
    return r


@dataclass(frozen=True)
class PathType:
    """Set of coordinates along which the stair-path ascends from q to p."""

    dim: int
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if self.dim < 1:
            raise DimensionError("path type dimension must be positive")
        if any(not (1 <= j <= self.dim) for j in self.members):
            raise DomainError(f"type members must lie in 1..{self.dim}")

    @classmethod
    def of(cls, q: Sequence, p: Sequence) -> "PathType":
        return cls(len(q), frozenset(j + 1 for j in range(len(q)) if q[j] < p[j]))

    @classmethod
    def parse(cls, dim: int, text: str) -> "PathType":
        text = text.strip().strip("{}")
        if text in ("", "empty", "∅"):
            return cls(dim, frozenset())
        return cls(dim, frozenset(int(tok) for tok in text.split(",") if tok.strip()))

    @property
    def is_normalized(self) -> bool:
        return 1 not in self.members and self.dim not in self.members

    def complement(self) -> "PathType":
        return PathType(self.dim, frozenset(range(1, self.dim + 1)) - self.members)

    def label(self) -> str:
        if not self.members:
            return "{}"
        return "{" + ",".join(str(j) for j in sorted(self.members)) + "}"

    def __str__(self) -> str:
        return self.label()


def enumerate_types(d: int) -> list:
    """All normalized path types in dimension ``d``: subsets of ``{2..d-1}``."""
    if d < 2:
        raise DimensionError("path types need d >= 2")
    inner = range(2, d)
    out = []
    for size in range(len(inner) + 1):
        for combo in combinations(inner, size):
            out.append(PathType(d, frozenset(combo)))
    return out


@dataclass(frozen=True)
class PathConfig:
    q: tuple
    p: tuple
    type: PathType


def normalize_type(T: PathType, q: Sequence, p: Sequence) -> PathConfig:
    """Equivalent configuration whose type contains neither 1 nor d.

    First swaps ``q`` and ``p`` when the path ascends in the last
    coordinate, then reflects the first coordinate if needed.  Both moves
    leave :func:`recfsg` unchanged.
    """
    q, p = as_point(q), as_point(p)
    d = len(q)
    if len(p) != d or T.dim != d:
        raise DimensionError("type and points differ in dimension")
    if PathType.of(q, p) != T:
        raise DomainError(f"sign pattern of (q, p) is {PathType.of(q, p)}, not {T}")
    if d in T.members:
        q, p = p, q
        T = T.complement()
    if 1 in T.members:
        q = (1 - q[0],) + q[1:]
        p = (1 - p[0],) + p[1:]
        T = PathType(d, T.members - {1})
    return PathConfig(q, p, T)


def boundary_slots(T: PathType) -> dict:
    """Coordinates pinned to the unit-cube boundary for a normalized type."""
    if T.dim in T.members:
        raise DomainError("boundary extension needs d not in T")
    fixed = {f"p{T.dim}": 0}
    if T.members:
        fixed[f"q{max(T.members)}"] = 0
    else:
        fixed["q1"] = 1
    return fixed


def extend_to_boundary(cfg: PathConfig) -> PathConfig:
    """Push the endpoints of the path out to the cube boundary."""
    fixed = boundary_slots(cfg.type)
    q, p = list(cfg.q), list(cfg.p)
    for slot, val in fixed.items():
        (q if slot[0] == "q" else p)[int(slot[1:]) - 1] = val
    return PathConfig(tuple(q), tuple(p), cfg.type)


@dataclass(frozen=True)
class ObjectiveSpec:
    """A box-constrained maximization problem for one path type.

    Free variables are ordered p-coordinates first, then q-coordinates,
    each in index order, skipping the pinned ones.
    """

    dim: int
    type: PathType
    fixed: dict
    free_slots: tuple
    ordering_constraints: tuple
    evaluator: Callable = field(repr=False, compare=False)
    batch_evaluator: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def bounds(self) -> list:
        return [(0.0, 1.0)] * len(self.free_slots)

    def points(self, x: Sequence) -> tuple:
        """Full ``(q, p)`` for a free-variable vector."""
        vals = dict(self.fixed)
        vals.update(zip(self.free_slots, x))
        q = tuple(vals[f"q{i}"] for i in range(1, self.dim + 1))
        p = tuple(vals[f"p{i}"] for i in range(1, self.dim + 1))
        return q, p

    def free_vector(self, q: Sequence, p: Sequence) -> list:
        vals = {f"q{i + 1}": v for i, v in enumerate(q)}
        vals.update({f"p{i + 1}": v for i, v in enumerate(p)})
        return [vals[s] for s in self.free_slots]

    def feasible(self, q, p) -> bool:
        vals = {f"q{i + 1}": v for i, v in enumerate(q)}
        vals.update({f"p{i + 1}": v for i, v in enumerate(p)})
        return all(vals[lo] <= vals[hi] for lo, hi in self.ordering_constraints)


def grid_objective(d: int, T: PathType) -> ObjectiveSpec:
    """Objective ``recfsg(q, p) / d!`` over the free coordinates of type ``T``.

    Points outside the type's sign pattern evaluate to 0.
    """
    if d < 2:
        raise DimensionError("grid objectives need d >= 2")
    if T.dim != d or not T.is_normalized:
        raise DomainError(f"type {T} is not a normalized type of dimension {d}")
    fixed = boundary_slots(T)
    slots = [f"p{i}" for i in range(1, d + 1)] + [f"q{i}" for i in range(1, d + 1)]
    free = tuple(s for s in slots if s not in fixed)
    order = tuple(
        (f"q{j}", f"p{j}") if j in T.members else (f"p{j}", f"q{j}") for j in range(1, d + 1)
    )
    scale = math.factorial(d)

    # column positions for the vectorized evaluator
    col = {s: i for i, s in enumerate(free)}
    q_idx = [col.get(f"q{i}") for i in range(1, d + 1)]
    p_idx = [col.get(f"p{i}") for i in range(1, d + 1)]
    q_fix = [fixed.get(f"q{i}", 0.0) for i in range(1, d + 1)]
    p_fix = [fixed.get(f"p{i}", 0.0) for i in range(1, d + 1)]
    lo_hi = [
        (col.get(lo), fixed.get(lo), col.get(hi), fixed.get(hi)) for lo, hi in order
    ]

    def evaluate(x):
        q = tuple(x[q_idx[i]] if q_idx[i] is not None else q_fix[i] for i in range(d))
        p = tuple(x[p_idx[i]] if p_idx[i] is not None else p_fix[i] for i in range(d))
        for lo_c, lo_v, hi_c, hi_v in lo_hi:
            lo = x[lo_c] if lo_c is not None else lo_v
            hi = x[hi_c] if hi_c is not None else hi_v
            if lo > hi:
                return 0.0
        return recfsg(q, p, check=False) / scale

    def evaluate_batch(X):
        X = np.asarray(X, dtype=float)
        n = X.shape[0]
        Q = np.empty((n, d))
        P = np.empty((n, d))
        for i in range(d):
            Q[:, i] = X[:, q_idx[i]] if q_idx[i] is not None else q_fix[i]
            P[:, i] = X[:, p_idx[i]] if p_idx[i] is not None else p_fix[i]
        ok = np.ones(n, dtype=bool)
        for lo_c, lo_v, hi_c, hi_v in lo_hi:
            lo = X[:, lo_c] if lo_c is not None else lo_v
            hi = X[:, hi_c] if hi_c is not None else hi_v
            ok &= lo <= hi
        return np.where(ok, recfsg_batch(Q, P) / scale, 0.0)

    return ObjectiveSpec(d, T, fixed, free, order, evaluate, evaluate_batch)


def fsl_objective(a: Sequence):
    """Product of the d+1 type-region volumes around ``a``."""
    out = 1
    for v in type_region_volumes(a):
        out = out * v
    return out


def fsl_objective_batch(A: np.ndarray) -> np.ndarray:
    """Vectorized :func:`fsl_objective`; rows on the cube boundary give 0."""
    A = np.asarray(A, dtype=float)
    n, d = A.shape
    out = np.ones(n)
    tail = np.ones(n)
    for j in range(d, 0, -1):
        out *= (1 - A[:, j - 1]) * tail
        tail = tail * A[:, j - 1]
    return out * tail
