"""Stabbing measures for the stretched diagonal.

The diagonal recursion is only defined for the ordered sub-family of
paths with::

    p_1 <= ... <= p_d,   q_2 <= ... <= q_d <= q_1 = 1,   p_i <= q_i.

All evaluators are generic in the number type, so ``Fraction`` inputs
give exact results.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConditionViolation, DimensionError
from .staircore import as_point


def check_conditions(q: Sequence, p: Sequence) -> None:
    """Raise :class:`ConditionViolation` naming the first failed inequality."""
    q, p = as_point(q), as_point(p)
    d = len(q)
    if len(p) != d:
        raise DimensionError("q and p differ in dimension")
    if q[0] != 1:
        raise ConditionViolation(f"q_1 = {q[0]} but must equal 1", "q_1 = 1")
    for i in range(1, d):
        if p[i - 1] > p[i]:
            raise ConditionViolation(f"p_{i} > p_{i + 1}", "p_i <= p_(i+1)")
    for i in range(2, d):
        if q[i - 1] > q[i]:
            raise ConditionViolation(f"q_{i} > q_{i + 1}", "q_i <= q_(i+1)")
    if d > 1 and q[d - 1] > q[0]:
        raise ConditionViolation(f"q_{d} > q_1", "q_d <= q_1")
    for i in range(d):
        if p[i] > q[i]:
            raise ConditionViolation(f"p_{i + 1} > q_{i + 1}", "p_i <= q_i")


def _recfsd(q, p):
    d = len(q)
    if d == 2:
        return q[1] - p[0]
    # q, p live in dimension d = e + 1
    e = d - 1
    prod = p[0]
    for i in range(2, e):
        prod = prod * (p[i - 1] - p[i - 2])
    return (q[e - 1] - p[e - 1]) * prod + (q[e] - q[e - 1]) * _recfsd(q[:-1], p[:-1])


def recfsd(q: Sequence, p: Sequence, *, check: bool = True):
    """Recursive diagonal stabbing measure in dimension ``d >= 2``."""
    q, p = as_point(q), as_point(p)
    if len(q) < 2:
        raise DimensionError("recfsd needs d >= 2")
    if check:
        check_conditions(q, p)
    return _recfsd(q, p)


def fsd(q: Sequence, p: Sequence, *, check: bool = True):
    """Measure of ordered diagonal d-tuples whose stair-simplex meets ``qp``.

    Computed by lifting both endpoints with a trailing coordinate 1.
    Multiply by ``d!`` for the probability over unordered tuples.
    """
    q, p = as_point(q), as_point(p)
    if check:
        check_conditions(q, p)
    one = type(q[-1])(1) if isinstance(q[-1], Fraction) else 1
    return _recfsd(q + (one,), p + (one,))


def fsd_closed_form(q: Sequence, p: Sequence):
    """Expanded formulas for d = 1, 2, 3 (cross-check for :func:`fsd`)."""
    d = len(q)
    if d == 1:
        return 1 - p[0]
    if d == 2:
        return (q[1] - p[1]) * p[0] + (1 - q[1]) * (q[1] - p[0])
    if d == 3:
        return (q[2] - p[2]) * p[0] * (p[1] - p[0]) + (1 - q[2]) * (
            (q[1] - p[1]) * p[0] + (q[2] - q[1]) * (q[1] - p[0])
        )
    raise DimensionError("closed forms are tabulated for d <= 3 only")


def theorem2_path(d: int) -> tuple:
    """Exact diagonal path ``(q, p)`` stabbing ``1/(d+2)^(d-1)`` of the simplices."""
    if d < 3:
        raise DimensionError("the explicit diagonal path is defined for d >= 3")
    c = d + 2
    q = (Fraction(1),) + tuple(Fraction(k, c) for k in range(3, d + 2))
    p = tuple(Fraction(k, c) for k in range(1, d)) + (Fraction(d - 1, c),)
    return q, p


# Objectives for every diagonal path type in dimension 3.  Variables are
# q1, q2, q3, p1, p2 (p3 is pinned to 0).  Each domain is a list of chains
# of strict inequalities, evaluated on their closure.

@dataclass(frozen=True)
class Diag3Objective:
    id: int
    type_label: str
    domain: tuple
    variables: tuple
    fixed: dict
    body: Callable = field(repr=False, compare=False)

    def in_domain(self, v: dict) -> bool:
        for chain in self.domain:
            vals = [_term(t, v) for t in chain]
            if any(a > b for a, b in zip(vals, vals[1:])):
                return False
        return True

    def __call__(self, v: dict):
        """Value at a full assignment ``v`` (clamped to 0 off the domain)."""
        full = dict(self.fixed)
        full.update(v)
        if not self.in_domain(full):
            return 0
        return self.body(full)

    def evaluate(self, x: Sequence):
        return self(dict(zip(self.variables, x)))

    def evaluate_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        v = dict(self.fixed)
        v.update({name: X[:, i] for i, name in enumerate(self.variables)})
        ok = np.ones(len(X), dtype=bool)
        for chain in self.domain:
            vals = [_term(t, v) for t in chain]
            for a, b in zip(vals, vals[1:]):
                ok &= np.asarray(a <= b)
        return np.where(ok, self.body(v), 0.0)

    @property
    def bounds(self) -> list:
        return [(0.0, 1.0)] * len(self.variables)

    def points(self, x: Sequence) -> tuple:
        """Full ``(q, p)`` for a free-variable vector (``p_3 = 0``)."""
        v = {"q1": 1, "q2": 0, "q3": 0, "p1": 0, "p2": 0}
        v.update(self.fixed)
        v.update(zip(self.variables, x))
        return (v["q1"], v["q2"], v["q3"]), (v["p1"], v["p2"], 0)

    def assignment(self, q: Sequence, p: Sequence) -> dict:
        return {"q1": q[0], "q2": q[1], "q3": q[2], "p1": p[0], "p2": p[1]}


def _term(t, v):
    return v[t] if isinstance(t, str) else t


def _chain(text: str) -> tuple:
    return tuple(int(t) if t in ("0", "1") else t for t in text.split("<"))


def _F(i, label, domains, body, q1=None):
    chains = tuple(_chain(d) for d in domains)
    names = {t for c in chains for t in c if isinstance(t, str)}
    fixed = {}
    if q1 is not None:
        fixed["q1"] = q1
        names.discard("q1")
    variables = tuple(n for n in ("p1", "p2", "q1", "q2", "q3") if n in names)
    return Diag3Objective(i, label, chains, variables, fixed, body)


def diag3_catalog() -> list:
    """The fifteen dimension-3 diagonal objectives F_1..F_15."""
    return [
        _F(1, "{}", ["0<p1<p2<q2<q3<1"],
           lambda v: v["p1"] * (v["q2"] - v["p2"]) * (1 - v["q3"])
           + v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + (v["q2"] - v["p1"]) * (1 - v["q3"]) * (v["q3"] - v["q2"]), q1=1),
        _F(2, "{}", ["0<p1<p2<q3<q2<1"],
           lambda v: v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + v["p1"] * (1 - v["q3"]) * (v["q3"] - v["p2"]), q1=1),
        _F(3, "{}", ["0<p2<p1<q3<q2<1"],
           lambda v: v["p1"] * (1 - v["q3"]) * (v["q3"] - v["p1"]), q1=1),
        _F(4, "{}", ["0<p2<p1<q2<q3<1"],
           lambda v: v["p1"] * (v["q2"] - v["p1"]) * (1 - v["q3"])
           + (v["q2"] - v["p1"]) * (1 - v["q3"]) * (v["q3"] - v["q2"]), q1=1),
        _F(5, "{1}", ["0<p1<p2<q2<q3<1"],
           lambda v: v["p1"] * (v["q2"] - v["p2"]) * (1 - v["q3"])
           + v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + v["p1"] * (1 - v["q3"]) * (v["q3"] - v["q2"]), q1=0),
        _F(6, "{1}", ["0<p1<p2<q3<q2<1"],
           lambda v: v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + v["p1"] * (1 - v["q3"]) * (v["q3"] - v["p2"]), q1=0),
        _F(7, "{1}", ["0<p2<p1<q3<q2<1"],
           lambda v: v["p1"] * (1 - v["q3"]) * (v["q3"] - v["p1"]), q1=0),
        _F(8, "{1}", ["0<p2<p1<q2<q3<1"],
           lambda v: v["p1"] * (v["q2"] - v["p1"]) * (1 - v["q3"])
           + v["p1"] * (1 - v["q3"]) * (v["q3"] - v["q2"]), q1=0),
        _F(9, "{1}", ["0<p2<q2<p1<1", "0<q2<q3<1"],
           lambda v: v["q2"] * (1 - v["q3"]) * (v["q3"] - v["q2"]), q1=0),
        _F(10, "{2}", ["0<p1<q1<p2<q3<1"],
           lambda v: (v["p2"] - v["q1"]) * v["q1"] * (1 - v["q3"])
           + v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + (v["q1"] - v["p1"]) * (1 - v["q3"]) * (v["q3"] - v["p2"])),
        _F(11, "{2}", ["0<p1<p2<q1<1", "0<p2<q3<1"],
           lambda v: v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + (v["p2"] - v["p1"]) * (1 - v["q3"]) * (v["q3"] - v["p2"])),
        _F(12, "{2}", ["0<p1<q1<q3<p2<1"],
           lambda v: v["q1"] * (1 - v["q3"]) * (v["q3"] - v["q1"])),
        _F(13, "{1,2}", ["0<q1<p1<p2<q3<1"],
           lambda v: (v["p2"] - v["q1"]) * v["q1"] * (1 - v["q3"])
           + v["p1"] * (v["p2"] - v["p1"]) * (v["q3"] - v["p2"])
           + (v["p1"] - v["q1"]) * (1 - v["q3"]) * (v["q3"] - v["p2"])),
        _F(14, "{1,2}", ["0<q1<p2<p1<1", "0<p2<q3<1"],
           lambda v: (v["p2"] - v["q1"]) * v["q1"] * (1 - v["q3"])
           + (v["p2"] - v["q1"]) * (1 - v["q3"]) * (v["q3"] - v["p2"])),
        _F(15, "{1,2}", ["0<q1<p1<1", "0<q1<q3<p2<1"],
           lambda v: v["q1"] * (1 - v["q3"]) * (v["q3"] - v["q1"])),
    ]
