"""δ-rectangles of a product of Cantor sets and overlap statistics of their projections.

The projection is π_s(x, y) = x − s·y.  A rectangle with center (x, y) and half
widths (u, v) projects onto the closed interval ``x − s·y ± (u + |s|·v)``.
Overlap counts are over ordered pairs and include the diagonal; closed intervals
that touch within ``TOUCH_TOL`` count as intersecting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyScale, HypothesisViolated
from .symbolic import DEFAULT_BUDGET, words_at_scale

TOUCH_TOL = 1e-12
PAIR_CHUNK = 1 << 22  # pairs per vectorized block


# -- embeddings ---------------------------------------------------------------


@dataclass(frozen=True)
class AffineEmbedding:
    """x ↦ offset + scale·x applied to cylinders."""

    offset: float = 0.0
    scale: float = 1.0

    def interval(self, system, word):
        lo, hi = system.cylinder_interval(word)
        a, b = self.offset + self.scale * lo, self.offset + self.scale * hi
        return (min(a, b), max(a, b))

    def length(self, system, word):
        return abs(self.scale) * system.cylinder_length(word)


IDENTITY = AffineEmbedding()


# -- rectangles ---------------------------------------------------------------


@dataclass(frozen=True)
class DeltaRectangle:
    word: tuple
    word2: tuple
    center: tuple
    half_widths: tuple

    @property
    def rect(self):
        (x, y), (u, v) = self.center, self.half_widths
        return ((x - u, x + u), (y - v, y + v))


class RectArrays(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __len__(self):
        return len(self.x)


def as_arrays(rects) -> RectArrays:
    if isinstance(rects, RectArrays):
        return rects
    if len(rects) == 0:
        e = np.zeros(0)
        return RectArrays(e, e, e, e)
    c = np.array([r.center for r in rects], dtype=float)
    h = np.array([r.half_widths for r in rects], dtype=float)
    return RectArrays(c[:, 0], c[:, 1], h[:, 0], h[:, 1])


def delta_rectangles(pair, delta, c0=2.0, embeddings=(IDENTITY, IDENTITY), starts=(None, None), budget=DEFAULT_BUDGET) -> list:
    """All products I(c) × I′(c′) of embedded cylinders of length between δ/c0 and c0·δ."""
    sys1, sys2 = pair
    emb1, emb2 = embeddings
    w1 = words_at_scale(sys1, delta, c0, length_fn=lambda w: emb1.length(sys1, w), starts=starts[0], budget=budget)
    w2 = words_at_scale(sys2, delta, c0, length_fn=lambda w: emb2.length(sys2, w), starts=starts[1], budget=budget)
    if not w1 or not w2:
        raise EmptyScale(f"no words at scale {delta} with c0={c0}", partial=(w1, w2))
    iv1 = [emb1.interval(sys1, w) for w in w1]
    iv2 = [emb2.interval(sys2, w) for w in w2]
    # half widths from the stable lengths, centers from the endpoints
    l1 = [emb1.length(sys1, w) for w in w1]
    l2 = [emb2.length(sys2, w) for w in w2]
    out = []
    for a, (lo1, hi1), len1 in zip(w1, iv1, l1):
        for b, (lo2, hi2), len2 in zip(w2, iv2, l2):
            out.append(DeltaRectangle(a, b, (0.5 * (lo1 + hi1), 0.5 * (lo2 + hi2)), (0.5 * len1, 0.5 * len2)))
    return out


def projected_intervals(rects, s) -> tuple:
    r = as_arrays(rects)
    c = r.x - s * r.y
    w = r.u + abs(s) * r.v
    return c - w, c + w


# -- overlap counts -------------------------------------------------------------


def count_overlaps(rects, s, tol=TOUCH_TOL) -> int:
    """N(s): ordered pairs (Q, Q̃), diagonal included, whose projections intersect.

    Sorting by left endpoint, interval i meets every later interval whose left end
    lies at or before its right end, so one binary search per interval counts the
    unordered pairs.
    """
    lo, hi = projected_intervals(rects, s)
    m = len(lo)
    if m == 0:
        return 0
    order = np.argsort(lo, kind="stable")
    lefts, rights = lo[order], hi[order]
    reach = np.searchsorted(lefts, rights + tol, side="right")
    pairs = int(np.sum(reach - np.arange(1, m + 1)))
    return m + 2 * pairs


def count_overlaps_bruteforce(rects, s, tol=TOUCH_TOL) -> int:
    """O(M²) reference count with the same closed-interval convention."""
    lo, hi = projected_intervals(rects, s)
    total = 0
    step = max(1, PAIR_CHUNK // max(1, len(lo)))
    for i in range(0, len(lo), step):
        a, b = lo[i:i + step, None], hi[i:i + step, None]
        total += int(np.count_nonzero(np.maximum(a, lo[None, :]) <= np.minimum(b, hi[None, :]) + tol))
    return total


# -- λ-measures -------------------------------------------------------------------


def _half_line_measure(dx, dy, U, V, R):
    """Measure of {λ ∈ [0, R] : |dx − λ·dy| ≤ U + λ·V} (vectorized).

    The condition splits into (dy + V)·λ ≥ dx − U and (dy − V)·λ ≤ dx + U.
    """
    lo = np.zeros(np.broadcast(dx, dy, U, V).shape)
    hi = np.full_like(lo, float(R))
    empty = np.zeros(lo.shape, dtype=bool)
    for c, d in ((-(dy + V), -(dx - U)), (dy - V, dx + U)):  # each as c·λ ≤ d
        c, d = np.broadcast_to(c, lo.shape), np.broadcast_to(d, lo.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = d / c
        hi = np.where(c > 0, np.minimum(hi, q), hi)
        lo = np.where(c < 0, np.maximum(lo, q), lo)
        empty |= (c == 0) & (d < 0)
    return np.where(empty, 0.0, np.maximum(hi - lo, 0.0))


def _pair_measure(dx, dy, U, V, R):
    return _half_line_measure(dx, dy, U, V, R) + _half_line_measure(dx, -dy, U, V, R)


def overlap_lambda_measure(q1: DeltaRectangle, q2: DeltaRectangle, R: float) -> float:
    """Lebesgue measure of {λ ∈ [−R, R] : π_λ(q1) ∩ π_λ(q2) ≠ ∅}."""
    if R <= 0:
        raise ValueError("R must be positive")
    dx = q2.center[0] - q1.center[0]
    dy = q2.center[1] - q1.center[1]
    U = q1.half_widths[0] + q2.half_widths[0]
    V = q1.half_widths[1] + q2.half_widths[1]
    return float(_pair_measure(dx, dy, U, V, R))


def integral_estimate(rects, R: float) -> float:
    """∫_{−R}^{R} N(λ) dλ, summed exactly pair by pair."""
    if R <= 0:
        raise ValueError("R must be positive")
    r = as_arrays(rects)
    m = len(r)
    total = 2.0 * R * m
    step = max(1, PAIR_CHUNK // max(1, m))
    for i0 in range(0, m, step):
        idx = np.arange(i0, min(m, i0 + step))
        a = idx[:, None]
        b = np.arange(m)[None, :]
        mask = b > a
        ia, ib = np.broadcast_to(a, mask.shape)[mask], np.broadcast_to(b, mask.shape)[mask]
        meas = _pair_measure(r.x[ib] - r.x[ia], r.y[ib] - r.y[ia], r.u[ia] + r.u[ib], r.v[ia] + r.v[ib], R)
        total += 2.0 * float(np.sum(meas))
    return total


def integral_by_quadrature(rects, R: float, step: float = 1e-4) -> float:
    """Trapezoidal rule for ∫ N(λ) dλ on a uniform grid (cross-check)."""
    n = int(round(2 * R / step))
    lam = np.linspace(-R, R, n + 1)
    vals = np.array([count_overlaps(rects, t) for t in lam], dtype=float)
    return float(np.trapezoid(vals, lam) if hasattr(np, "trapezoid") else np.trapz(vals, lam))


# -- interval unions --------------------------------------------------------------


def interval_union(intervals, tol=TOUCH_TOL) -> list:
    """Merge closed intervals; gaps no wider than ``tol`` are closed."""
    arr = np.asarray(list(intervals), dtype=float).reshape(-1, 2)
    if len(arr) == 0:
        return []
    arr = arr[np.argsort(arr[:, 0], kind="stable")]
    merged = []
    cur_lo, cur_hi = arr[0]
    for lo, hi in arr[1:]:
        if lo <= cur_hi + tol:
            cur_hi = max(cur_hi, hi)
        else:
            merged.append((float(cur_lo), float(cur_hi)))
            cur_lo, cur_hi = lo, hi
    merged.append((float(cur_lo), float(cur_hi)))
    return merged


def union_measure(intervals) -> float:
    return float(sum(hi - lo for lo, hi in interval_union(intervals, tol=0.0)))


def projection_union_measure(rects, s) -> float:
    """Lebesgue measure of π_s of the union of the rectangles."""
    lo, hi = projected_intervals(rects, s)
    return union_measure(zip(lo, hi))


def projection_lower_bound(n_family: int, delta: float, c0: float, n_max: int) -> float:
    """Right-hand side c0⁻¹·c̃⁻¹·b²·δ^{1−d−d′}/4 with b = #F·δ^D and c̃ = N_max·δ^D.

    The exponent D cancels: the bound equals (#F)²·δ / (4·c0·N_max).
    """
    return n_family**2 * delta / (4.0 * c0 * n_max)


# -- sublemmas ----------------------------------------------------------------------


@dataclass(frozen=True)
class SublemmaCheck:
    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs * (1 - 1e-12)


def sublemma_one(J, J_prime, eps: float, lam: float, nu: float) -> SublemmaCheck:
    """Leb(⋃J′) ≥ Leb(⋃J) / (λ(4ν + 4)) for paired families with comparable sizes and close centers."""
    J = np.asarray(J, dtype=float).reshape(-1, 2)
    Jp = np.asarray(J_prime, dtype=float).reshape(-1, 2)
    if len(J) != len(Jp):
        raise HypothesisViolated("families must be indexed by the same set")
    if not (eps > 0 and lam > 1 and nu > 0):
        raise HypothesisViolated("need eps > 0, lambda > 1, nu > 0")
    lj, lp = J[:, 1] - J[:, 0], Jp[:, 1] - Jp[:, 0]
    if np.any(lj <= eps) or np.any(lj >= lam * eps) or np.any(lp <= eps):
        raise HypothesisViolated("interval lengths outside (eps, lambda·eps) or below eps")
    gap = np.abs((J[:, 0] + J[:, 1]) - (Jp[:, 0] + Jp[:, 1])) / 2
    if np.any(gap > nu * eps):
        raise HypothesisViolated("centers farther apart than nu·eps")
    return SublemmaCheck("sublemma1", union_measure(Jp), union_measure(J) / (lam * (4 * nu + 4)))


def sublemma_two(J, K, nu: float) -> SublemmaCheck:
    """Leb(⋃K) ≥ ν·Leb(⋃J)/2 when each K_α ⊆ J_α carries a fraction ν of J_α.

    ``K[α]`` is a list of intervals inside ``J[α]``.
    """
    J = np.asarray(J, dtype=float).reshape(-1, 2)
    if len(J) != len(K):
        raise HypothesisViolated("families must be indexed by the same set")
    if not 0 < nu <= 1:
        raise HypothesisViolated("need 0 < nu <= 1")
    pieces = []
    for (lo, hi), k in zip(J, K):
        k = interval_union(k, tol=0.0)
        if any(a < lo or b > hi for a, b in k):
            raise HypothesisViolated("K_alpha is not inside J_alpha")
        if sum(b - a for a, b in k) < nu * (hi - lo) * (1 - 1e-12):
            raise HypothesisViolated("K_alpha carries less than nu·|J_alpha|")
        pieces.extend(k)
    return SublemmaCheck("sublemma2", union_measure(pieces), 0.5 * nu * union_measure(J))


def sublemma_union_bounds(J, *, J_prime=None, K=None, eps=None, lam=None, nu=1.0) -> list:
    """Run whichever sublemma checks the supplied families allow."""
    out = []
    if J_prime is not None:
        out.append(sublemma_one(J, J_prime, eps, lam, nu))
    if K is not None:
        out.append(sublemma_two(J, K, nu))
    if not out:
        raise ValueError("supply J_prime and/or K")
    return out
