"""Ground truth on explicit stretched point sets.

Coordinates are exact integers or ``Fraction`` throughout; nothing here
rounds.  The convex oracle decides segment-versus-simplex intersection by
exact linear feasibility, so it does not share any logic with the
stair-convexity predicates it is used to check.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence, TextIO

import numpy as np

from .errors import BudgetError, DimensionError, DomainError
from .staircore import stab_check_batch

KINDS = ("grid", "diagonal", "uniform")


@dataclass(frozen=True)
class StretchedSet:
    """Stretched grid, stretched diagonal or uniform grid in its bounding box.

    ``axes[i]`` holds the increasing coordinates used along axis ``i`` and
    ``stretch[i]`` the factor ``K`` with ``x << y`` meaning ``K x <= y``.
    """

    kind: str
    dim: int
    size: int
    axes: tuple
    stretch: tuple
    spread: int = 1

    def points(self) -> list:
        if self.kind == "diagonal":
            return [tuple(ax[j] for ax in self.axes) for j in range(self.size)]
        return list(product(*self.axes))

    def __len__(self) -> int:
        return self.size if self.kind == "diagonal" else self.size**self.dim

    @property
    def bounding_box(self) -> list:
        return [(ax[0], ax[-1]) for ax in self.axes]


def build_stretched(kind: str, d: int, size: int, spread: int = 1) -> StretchedSet:
    """Build a stretched set with exact integer axes.

    Consecutive coordinates grow by ``K_i ** spread``; ``spread=1`` is the
    slowest growth compatible with the definition, larger values leave
    room for far-apart points strictly between grid coordinates.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if d < 2 or size < 2:
        raise DimensionError("stretched sets need d >= 2 and size >= 2")
    if spread < 1:
        raise ValueError("spread must be >= 1")
    if size**d > 10**6 and kind != "diagonal":
        raise BudgetError(f"{size}^{d} grid points exceed the enumeration limit")
    axes, ks = [], []
    k = 2**d
    for _ in range(d):
        ks.append(k)
        axis = [1]
        for _ in range(size - 1):
            axis.append(axis[-1] * k**spread)
        axes.append(tuple(axis))
        k = 2**d * axis[-1]
    if kind == "uniform":
        axes = [
            tuple(1 + Fraction(j, size - 1) * (ax[-1] - 1) for j in range(size)) for ax in axes
        ]
    return StretchedSet(kind, d, size, tuple(tuple(a) for a in axes), tuple(ks), spread)


def _check_inside(s: StretchedSet, x) -> None:
    if len(x) != s.dim:
        raise DimensionError(f"point has {len(x)} coordinates, set has {s.dim}")
    for xi, ax in zip(x, s.axes):
        if not (ax[0] <= xi <= ax[-1]):
            raise DomainError(f"coordinate {xi} outside [{ax[0]}, {ax[-1]}]")


def pi_map(s: StretchedSet, x: Sequence) -> tuple:
    """Order-preserving piecewise-linear map of the bounding box onto ``[0,1]^d``.

    Axis coordinate ``j`` (0-based) goes to ``j / (size - 1)``.
    """
    _check_inside(s, x)
    m = s.size - 1
    out = []
    for xi, ax in zip(x, s.axes):
        j = min(bisect_right(ax, xi) - 1, m - 1)
        frac = Fraction(xi - ax[j]) / (ax[j + 1] - ax[j])
        out.append((j + frac) / m)
    return tuple(out)


def pi_inverse(s: StretchedSet, u: Sequence) -> tuple:
    """Inverse of :func:`pi_map`."""
    if len(u) != s.dim:
        raise DimensionError("dimension mismatch")
    m = s.size - 1
    out = []
    for ui, ax in zip(u, s.axes):
        ui = Fraction(ui)
        if not (0 <= ui <= 1):
            raise DomainError(f"{ui} outside [0, 1]")
        t = ui * m
        j = min(math.floor(t), m - 1)
        out.append(ax[j] + (t - j) * (ax[j + 1] - ax[j]))
    return tuple(out)


def cell_midpoint(s: StretchedSet, u: Sequence) -> tuple:
    """Midpoint of the grid cell whose image under pi contains ``u``.

    Per axis the cell is ``[x_j, x_(j+1)]`` with ``j = floor(u (size-1))``,
    clamped to the last cell at ``u = 1``.
    """
    if len(u) != s.dim:
        raise DimensionError("dimension mismatch")
    m = s.size - 1
    out = []
    for ui, ax in zip(u, s.axes):
        ui = Fraction(ui)
        if not (0 <= ui <= 1):
            raise DomainError(f"{ui} outside [0, 1]")
        j = min(math.floor(ui * m), m - 1)
        out.append(Fraction(ax[j] + ax[j + 1], 2))
    return tuple(out)


def sandwich_point(s: StretchedSet, u: Sequence) -> tuple:
    """Point whose per-axis rank among the grid coordinates matches ``u``.

    Along axis ``i`` exactly ``k = floor(u_i * size)`` grid coordinates
    lie below the result, which is the midpoint of the cell
    ``[x_k, x_(k+1)]``.  The axis is extended by one stretch step beyond
    each end (``x_0 = x_1 / K``, ``x_(size+1) = K x_size``) so that ``u_i``
    of 0 or 1 puts the point below or above every grid coordinate.
    """
    if len(u) != s.dim:
        raise DimensionError("dimension mismatch")
    out = []
    for ui, ax, k in zip(u, s.axes, s.stretch):
        ui = Fraction(ui)
        if not (0 <= ui <= 1):
            raise DomainError(f"{ui} outside [0, 1]")
        ext = (Fraction(ax[0], k),) + tuple(ax) + (ax[-1] * k,)
        j = math.floor(ui * s.size)
        out.append((ext[j] + ext[j + 1]) / 2)
    return tuple(out)


def far_apart(a: Sequence, b: Sequence, s: StretchedSet) -> bool:
    """Whether ``a`` and ``b`` differ by a factor ``K_i`` along every axis."""
    for ai, bi, k in zip(a, b, s.stretch):
        lo, hi = (ai, bi) if ai <= bi else (bi, ai)
        if not k * lo <= hi:
            return False
    return True


def _feasible(A: list, b: list) -> bool:
    """Exact phase-one simplex: does ``A x = b, x >= 0`` have a solution?

    Bland's rule; ``A`` and ``b`` hold ``Fraction`` or ``int`` entries.
    """
    m, n = len(A), len(A[0])
    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        art = [0] * m
        art[i] = 1
        rows.append([Fraction(sign * a) for a in A[i]] + art + [Fraction(sign * b[i])])
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs of the phase-one objective: minimize the sum of artificials
    cost = [-sum(r[j] for r in rows) for j in range(width)] + [-sum(r[-1] for r in rows)]
    for i in range(m):
        cost[n + i] = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            break
        piv = rows[leave]
        pv = piv[enter]
        piv = [v / pv for v in piv]
        rows[leave] = piv
        for i, r in enumerate(rows):
            if i != leave and r[enter] != 0:
                f = r[enter]
                rows[i] = [rv - f * pvv for rv, pvv in zip(r, piv)]
        f = cost[enter]
        cost = [cv - f * pvv for cv, pvv in zip(cost, piv)]
        basis[leave] = enter
    return cost[-1] == 0


def _bareiss_det(M: list) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    M = [row[:] for row in M]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _radon_decision(Y: list, Z: list) -> Optional[bool]:
    """Hull intersection from the affine dependency of ``Y + Z``.

    Needs ``|Y| + |Z| = d + 2`` points spanning ``R^d`` affinely; returns
    None when they do not, leaving the case to the LP.
    """
    pts = Y + Z
    den = 1
    for pt in pts:
        for c in pt:
            den = math.lcm(den, Fraction(c).denominator)
    cols = [[int(Fraction(c) * den) for c in pt] + [1] for pt in pts]
    n = len(cols)
    mu = []
    for i in range(n):
        rest = cols[:i] + cols[i + 1 :]
        minor = [[col[r] for col in rest] for r in range(n - 1)]
        mu.append((-1) ** i * _bareiss_det(minor))
    if not any(mu):
        return None
    sy = sum(mu[: len(Y)])
    if sy == 0:
        return False
    sgn = 1 if sy > 0 else -1
    return all(sgn * m >= 0 for m in mu[: len(Y)]) and all(sgn * m <= 0 for m in mu[len(Y) :])


def convex_stab_exact(q: Sequence, p: Sequence, Z: Sequence[Sequence], *, fast: bool = True) -> bool:
    """Exact test whether segment ``qp`` meets the convex hull of ``Z``.

    Solves ``sum(l_i z_i) = q + t (p - q)``, ``sum(l_i) = 1``, ``l >= 0``,
    ``0 <= t <= 1`` over the rationals.  Degenerate ``Z`` is fine.  With
    ``fast`` set, ``d`` vertices in general position are first decided by
    the signs of the unique affine dependency of the ``d + 2`` points.
    """
    Z = [tuple(z) for z in Z]
    d = len(q)
    if len(p) != d or any(len(z) != d for z in Z):
        raise DimensionError("dimension mismatch")
    # cheap exact rejection: disjoint bounding boxes
    for i in range(d):
        zlo = min(z[i] for z in Z)
        zhi = max(z[i] for z in Z)
        if max(q[i], p[i]) < zlo or min(q[i], p[i]) > zhi:
            return False
    k = len(Z)
    if fast and q != p and k == d:
        verdict = _radon_decision([tuple(q), tuple(p)], Z)
        if verdict is not None:
            return verdict
    # variables: l_1..l_k, t, slack for t <= 1
    A, b = [], []
    for i in range(d):
        A.append([z[i] for z in Z] + [q[i] - p[i], 0])
        b.append(q[i])
    A.append([1] * k + [0, 0])
    b.append(1)
    A.append([0] * k + [1, 1])
    b.append(1)
    return _feasible(A, b)


@dataclass(frozen=True)
class StabCensus:
    total_simplices: int
    stabbed: int
    segment: tuple

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.stabbed, self.total_simplices)


def stab_census(s: StretchedSet, q: Sequence, p: Sequence, max_subsets: int = 10**7) -> StabCensus:
    """Count the d-subsets of ``s`` whose convex hull meets segment ``qp``."""
    pts = s.points()
    total = math.comb(len(pts), s.dim)
    if total > max_subsets:
        raise BudgetError(f"{total} subsets exceed the limit of {max_subsets}")
    hits = sum(1 for Z in combinations(pts, s.dim) if convex_stab_exact(q, p, Z))
    return StabCensus(total, hits, (tuple(q), tuple(p)))


def export_points(s: StretchedSet, fh: TextIO) -> None:
    """Write one point per line as space-separated exact decimal coordinates."""
    for pt in s.points():
        fh.write(" ".join(_exact_decimal(c) for c in pt) + "\n")


def _exact_decimal(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# Monte Carlo estimators.  Samples are drawn in fixed-size blocks, each from
# its own stream keyed by (seed, block index), so the estimate does not depend
# on how blocks are scheduled.

MC_BLOCK = 100_000


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block]))


def _redraw_ties(rng, Z, q, p, draw):
    # resample simplices that share a coordinate value with q or p
    qa, pa = np.asarray(q, float), np.asarray(p, float)
    while True:
        bad = ((Z == qa).any(axis=(1, 2))) | ((Z == pa).any(axis=(1, 2)))
        bad |= _internal_ties(Z)
        if not bad.any():
            return Z
        Z[bad] = draw(rng, int(bad.sum()))


def _internal_ties(Z):
    s = np.sort(Z, axis=1)
    return (np.diff(s, axis=1) == 0).any(axis=(1, 2))


def _mc(q, p, samples, seed, draw):
    d = len(q)
    if len(p) != d:
        raise DimensionError("q and p differ in dimension")
    if samples < 1:
        raise BudgetError("need at least one sample")
    hits = 0
    done, block = 0, 0
    while done < samples:
        m = min(MC_BLOCK, samples - done)
        rng = _block_rng(seed, block)
        Z = _redraw_ties(rng, draw(rng, m), q, p, draw)
        hits += int(stab_check_batch(q, p, Z).sum())
        done += m
        block += 1
    est = hits / samples
    return est, math.sqrt(est * (1 - est) / samples)


def mc_estimate_recfsg(q: Sequence[float], p: Sequence[float], samples: int = 10**6, seed: int = 0):
    """Fraction of uniform random stair-simplices met by the stair-path ``qp``.

    Returns ``(estimate, binomial standard error)``.
    """
    d = len(q)
    return _mc(q, p, samples, seed, lambda rng, m: rng.random((m, d, d)))


def mc_estimate_fsd(q: Sequence[float], p: Sequence[float], samples: int = 10**6, seed: int = 0):
    """Monte Carlo estimate of ``d! * fsd(q, p)`` from random diagonal simplices."""
    d = len(q)

    def draw(rng, m):
        a = np.sort(rng.random((m, d)), axis=1)
        return np.repeat(a[:, :, None], d, axis=2)

    return _mc(q, p, samples, seed, draw)


# Far-apart instances for checking the transference equivalence.  On a grid
# built with spread >= 4 every cell [x_j, x_(j+1)] has room for two extra
# positions x_j K r (r in [1, 2)) and x_j K^2 r (r in [2, 3)) that are far
# apart from each other and from every grid coordinate.

def _generic_coordinate(ax, k, cell, slot, rng):
    r = Fraction(int(rng.integers(0, 1000)), 1000) + slot
    return ax[cell] * k**slot * r


def random_far_apart_instance(s: StretchedSet, rng: np.random.Generator) -> tuple:
    """Random segment ``(q, p)`` and d grid points, pairwise far apart.

    The grid points use distinct indices on every axis; the segment
    endpoints sit at rational positions strictly inside grid cells.
    """
    if s.kind != "grid" or s.spread < 4:
        raise ValueError("far-apart instances need a grid built with spread >= 4")
    if s.size < s.dim:
        raise DimensionError("need size >= dim for d points with distinct indices")
    d, m = s.dim, s.size
    idx = [rng.permutation(m)[:d] for _ in range(d)]
    Z = [tuple(s.axes[i][int(idx[i][j])] for i in range(d)) for j in range(d)]
    q, p = [], []
    for ax, k in zip(s.axes, s.stretch):
        slots = [(c, t) for c in range(m - 1) for t in (1, 2)]
        a, b = rng.choice(len(slots), 2, replace=False)
        q.append(_generic_coordinate(ax, k, *slots[a], rng))
        p.append(_generic_coordinate(ax, k, *slots[b], rng))
    return tuple(q), tuple(p), Z


def transference_mismatches(s: StretchedSet, trials: int, seed: int = 0) -> tuple:
    """Compare the convex oracle with the stair predicate on pi-images.

    Returns ``(mismatches, stabbed)`` over ``trials`` random far-apart
    instances.
    """
    from .staircore import stconv_intersect

    rng = np.random.default_rng(np.random.SeedSequence([seed, s.dim, s.size]))
    bad = hits = 0
    for _ in range(trials):
        q, p, Z = random_far_apart_instance(s, rng)
        euclid = convex_stab_exact(q, p, Z)
        stair = stconv_intersect([pi_map(s, q), pi_map(s, p)], [pi_map(s, z) for z in Z])
        hits += euclid
        bad += euclid != stair
    return bad, hits
