"""Stair-convexity primitives.

Points are plain sequences of numbers (floats, ``Fraction``, ``mpf`` ...);
every predicate here only compares coordinates, so exact and floating
inputs go through the same code.  The last coordinate of a point is its
*height*.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError, EmptyInputError, SharedCoordinateError

Point = tuple


def as_point(a) -> tuple:
    pt = tuple(a)
    if not pt:
        raise DimensionError("a point needs at least one coordinate")
    return pt


def _same_dim(*points) -> int:
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def _check_no_shared(points) -> None:
    """Raise unless no two points agree in any single coordinate."""
    d = len(points[0])
    for i in range(d):
        seen = set()
        for p in points:
            if p[i] in seen:
                raise SharedCoordinateError(f"coordinate {i + 1} value {p[i]!r} is shared")
            seen.add(p[i])


@dataclass(frozen=True)
class StairPath:
    """The stair-path between two points as a chain of axis-parallel segments."""

    start: tuple
    end: tuple
    segments: tuple

    @property
    def vertices(self) -> list:
        if not self.segments:
            return [self.start]
        return [self.segments[0][0]] + [s[1] for s in self.segments]

    def contains(self, x) -> bool:
        """Exact test whether ``x`` lies on one of the closed segments."""
        x = tuple(x)
        for u, v in self.segments:
            ok = True
            for ui, vi, xi in zip(u, v, x):
                if not (min(ui, vi) <= xi <= max(ui, vi)):
                    ok = False
                    break
            if ok:
                return True
        return not self.segments and x == self.start


def _stair_vertices(a: tuple, b: tuple, k: int) -> list:
    # coordinates k.. of a and b already agree
    if k == 0:
        return [a]
    if a[k - 1] > b[k - 1]:
        return _stair_vertices(b, a, k)[::-1]
    a2 = a[: k - 1] + (b[k - 1],) + a[k:]
    rest = _stair_vertices(a2, b, k - 1)
    return rest if a2 == a else [a] + rest


def stair_path(a: Sequence, b: Sequence) -> StairPath:
    """Stair-path from ``a`` to ``b``.

    The path first moves along the last axis to the height of the higher
    endpoint, then continues recursively in the remaining coordinates.
    Zero-length legs are omitted.
    """
    a, b = as_point(a), as_point(b)
    d = _same_dim(a, b)
    verts = _stair_vertices(a, b, d)
    if verts[-1] != b:
        verts.append(b)
    segs = tuple((u, v) for u, v in zip(verts, verts[1:]) if u != v)
    return StairPath(a, b, segs)


def type_of(b: Sequence, a: Sequence) -> int:
    """Type of ``b`` with respect to ``a``.

    0 when ``b`` is below ``a`` in every coordinate, otherwise the largest
    (1-based) index ``j`` with ``b_j > a_j``.
    """
    a, b = as_point(a), as_point(b)
    d = _same_dim(a, b)
    for j in range(d - 1, -1, -1):
        if b[j] == a[j]:
            raise SharedCoordinateError(f"coordinate {j + 1} is shared")
        if b[j] > a[j]:
            for i in range(j):
                if b[i] == a[i]:
                    raise SharedCoordinateError(f"coordinate {i + 1} is shared")
            return j + 1
    return 0


def type_region_volumes(a: Sequence) -> list:
    """Measures of the d+1 type regions of ``[0,1]^d`` around ``a``.

    Entry ``j`` is the volume of ``{b : type_of(b, a) == j}``.
    """
    a = as_point(a)
    if any(not (0 < x < 1) for x in a):
        raise DomainError("type_region_volumes needs a point of the open unit cube")
    d = len(a)
    vols = [None] * (d + 1)
    tail = 1
    for j in range(d, 0, -1):
        vols[j] = (1 - a[j - 1]) * tail
        tail = tail * a[j - 1]
    vols[0] = tail
    return vols


def point_in_stconv(X: Sequence[Sequence], a: Sequence) -> bool:
    """Whether ``a`` lies in the stair-convex hull of ``X``.

    True iff ``X`` holds a point of every type 0..d with respect to ``a``.
    """
    X = [as_point(x) for x in X]
    if not X:
        raise EmptyInputError("empty point set")
    a = as_point(a)
    d = _same_dim(a, *X)
    found = {type_of(x, a) for x in X}
    return len(found) == d + 1


def in_stconv_slices(X: Sequence[Sequence], a: Sequence) -> bool:
    """Closed stair-convex hull membership by horizontal slicing.

    Independent of :func:`point_in_stconv`: the slice of the hull at the
    height of ``a`` is the hull of the projected points at or below it.
    Ties are allowed.
    """
    X = [as_point(x) for x in X]
    if not X:
        raise EmptyInputError("empty point set")
    a = as_point(a)
    _same_dim(a, *X)
    return _slice_member(X, a)


def _slice_member(X, a) -> bool:
    if not X:
        return False
    d = len(a)
    if d == 0:
        return True
    h = a[-1]
    if max(x[-1] for x in X) < h:
        return False
    return _slice_member([x[:-1] for x in X if x[-1] <= h], a[:-1])


def _prepare_pair(Y, Z):
    Y = [as_point(y) for y in Y]
    Z = [as_point(z) for z in Z]
    if not Y or not Z:
        raise EmptyInputError("both point sets must be nonempty")
    d = _same_dim(*Y, *Z)
    _check_no_shared(Y + Z)
    return Y, Z, d


def _meet_exact(Y: list, Z: list, d: int) -> bool:
    """Decision for |Y| + |Z| == d + 2 by peeling off the highest point."""
    if not Y or not Z:
        return False
    if d == 1:
        return max(min(y[0] for y in Y), min(z[0] for z in Z)) <= min(
            max(y[0] for y in Y), max(z[0] for z in Z)
        )
    tagged = sorted([(y[-1], 0, i) for i, y in enumerate(Y)] + [(z[-1], 1, i) for i, z in enumerate(Z)])
    top, second = tagged[-1], tagged[-2]
    if top[1] == second[1]:
        return False
    if top[1] == 0:
        Y = Y[: top[2]] + Y[top[2] + 1 :]
    else:
        Z = Z[: top[2]] + Z[top[2] + 1 :]
    return _meet_exact([y[:-1] for y in Y], [z[:-1] for z in Z], d - 1)


def stconv_intersect(Y: Sequence[Sequence], Z: Sequence[Sequence]) -> bool:
    """Whether the stair-convex hulls of ``Y`` and ``Z`` intersect.

    No two points of ``Y`` and ``Z`` may share a coordinate value.  Fewer
    than d+2 points never meet; exactly d+2 are decided by the height
    recursion; larger inputs are reduced to every sub-pair of total size
    d+2.
    """
    Y, Z, d = _prepare_pair(Y, Z)
    s, t = len(Y), len(Z)
    if s + t < d + 2:
        return False
    if s + t == d + 2:
        return _meet_exact(Y, Z, d)
    for k in range(1, min(s, d + 1) + 1):
        m = d + 2 - k
        if m < 1 or m > t:
            continue
        for Ys in combinations(Y, k):
            for Zs in combinations(Z, m):
                if _meet_exact(list(Ys), list(Zs), d):
                    return True
    return False


def stconv_meet(Y: Sequence[Sequence], Z: Sequence[Sequence]) -> Optional[tuple]:
    """Common point of the two hulls when ``|Y| + |Z| == d + 2``, else None.

    Such hulls meet in at most one point; its coordinate along each axis
    is the lower of the two set-tops at the corresponding recursion level.
    """
    Y, Z, d = _prepare_pair(Y, Z)
    if len(Y) + len(Z) != d + 2:
        raise DimensionError("stconv_meet needs exactly d + 2 points in total")
    coords = [None] * d
    for k in range(d, 0, -1):
        tagged = sorted([(y[k - 1], 0, i) for i, y in enumerate(Y)] + [(z[k - 1], 1, i) for i, z in enumerate(Z)])
        if len(tagged) < 2:
            return None
        top, second = tagged[-1], tagged[-2]
        if top[1] == second[1]:
            return None
        coords[k - 1] = second[0]
        if top[1] == 0:
            del Y[top[2]]
        else:
            del Z[top[2]]
        if not Y or not Z:
            return None
    return tuple(coords)


def stconv_intersect_slices(Y: Sequence[Sequence], Z: Sequence[Sequence]) -> bool:
    """Hull intersection by slicing at the lower of the two set-tops.

    Works for any sizes and tolerates ties; used to cross-check
    :func:`stconv_intersect`.
    """
    Y = [as_point(y) for y in Y]
    Z = [as_point(z) for z in Z]
    if not Y or not Z:
        raise EmptyInputError("both point sets must be nonempty")
    _same_dim(*Y, *Z)
    return _slice_intersect(Y, Z)


def _slice_intersect(Y, Z) -> bool:
    if not Y or not Z:
        return False
    if len(Y[0]) == 0:
        return True
    h = min(max(y[-1] for y in Y), max(z[-1] for z in Z))
    return _slice_intersect([y[:-1] for y in Y if y[-1] <= h], [z[:-1] for z in Z if z[-1] <= h])


def stab_check(q: Sequence, p: Sequence, Z: Sequence[Sequence]) -> bool:
    """Whether the stair-path from ``q`` to ``p`` meets the stair-simplex of ``Z``."""
    q, p = as_point(q), as_point(p)
    d = _same_dim(q, p)
    if len(Z) != d:
        raise DimensionError(f"a stair-simplex in dimension {d} needs {d} vertices, got {len(Z)}")
    return stconv_intersect([q, p], Z)


def stab_check_batch(q: Sequence[float], p: Sequence[float], Z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`stab_check` over many stair-simplices.

    ``Z`` has shape ``(n, d, d)``: ``n`` simplices of ``d`` vertices each.
    Returns a boolean array of length ``n``.  Inputs are assumed generic
    (no shared coordinates).
    """
    Z = np.asarray(Z, dtype=float)
    n, k, d = Z.shape
    if k != d or len(q) != d or len(p) != d:
        raise DimensionError("Z must have shape (n, d, d) matching q and p")
    # columns 0, 1 hold q and p; the rest the simplex vertices
    pts = np.empty((n, d + 2, d))
    pts[:, 0, :] = np.asarray(q, dtype=float)
    pts[:, 1, :] = np.asarray(p, dtype=float)
    pts[:, 2:, :] = Z
    alive = np.ones((n, d + 2), dtype=bool)
    ok = np.ones(n, dtype=bool)
    rows = np.arange(n)
    for level in range(d - 1, -1, -1):
        h = np.where(alive, pts[:, :, level], -np.inf)
        top = np.argmax(h, axis=1)
        h[rows, top] = -np.inf
        second = np.argmax(h, axis=1)
        ok &= (top < 2) != (second < 2)
        alive[rows, top] = False
    # after peeling d points one point of each set must remain
    ok &= alive[:, :2].any(axis=1) & alive[:, 2:].any(axis=1)
    return ok
