"""Box-counting scans of images f(K × K′) under linear and quadratic maps of the plane."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dimension import box_dimension_estimate
from .errors import EmptyScale
from .marstrand import TOUCH_TOL, interval_union
from .symbolic import DEFAULT_BUDGET
from .system import cover_words

WITNESS_TOL = 1e-6
CELL_EPS = 1e-9
FIT_SCALES = 5


# -- maps -----------------------------------------------------------------------


@dataclass(frozen=True)
class LinearProjection:
    """(x, y) ↦ x − s·y"""

    s: float
    family = "linear_projection"

    def __call__(self, x, y):
        return x - self.s * y

    def gradient(self, x, y):
        return np.ones_like(np.asarray(x, dtype=float)), np.full_like(np.asarray(y, dtype=float), -self.s)

    def curvature_bound(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Sum:
    """(x, y) ↦ x + s·y"""

    s: float
    family = "sum"

    def __call__(self, x, y):
        return x + self.s * y

    def gradient(self, x, y):
        return np.ones_like(np.asarray(x, dtype=float)), np.full_like(np.asarray(y, dtype=float), self.s)

    def curvature_bound(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Quadratic:
    """(x, y) ↦ c0 + c1·x + c2·y + c3·x² + c4·x·y + c5·y²"""

    coeffs: tuple
    family = "quadratic"

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise ValueError("Quadratic needs six coefficients")

    def __call__(self, x, y):
        c = self.coeffs
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y

    def gradient(self, x, y):
        c = self.coeffs
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return c[1] + 2 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2 * c[5] * y

    def curvature_bound(self) -> float:
        """Sup-norm of the second partials."""
        c = self.coeffs
        return max(abs(2 * c[3]), abs(c[4]), abs(2 * c[5]))


MAPS = {"linear_projection": LinearProjection, "sum": Sum, "quadratic": Quadratic}


def make_map(family: str, param):
    if family == "quadratic":
        return Quadratic(tuple(float(c) for c in param))
    return MAPS[family](float(param))


# -- covers ----------------------------------------------------------------------


def _cover_boxes(pair, delta, budget):
    sys1, sys2 = pair
    w1 = cover_words(sys1, delta, budget)
    w2 = cover_words(sys2, delta, budget)
    if not w1 or not w2:
        raise EmptyScale(f"empty cover at delta={delta}")
    i1 = np.array([sys1.cylinder_interval(w) for w in w1])
    i2 = np.array([sys2.cylinder_interval(w) for w in w2])
    x0 = np.repeat(i1[:, 0], len(i2))
    x1 = np.repeat(i1[:, 1], len(i2))
    y0 = np.tile(i2[:, 0], len(i1))
    y1 = np.tile(i2[:, 1], len(i1))
    return x0, x1, y0, y1


def _image_intervals(fmap, boxes):
    x0, x1, y0, y1 = boxes
    corners = np.stack([fmap(x0, y0), fmap(x0, y1), fmap(x1, y0), fmap(x1, y1)])
    pad = fmap.curvature_bound() * ((x1 - x0) ** 2 + (y1 - y0) ** 2)
    return corners.min(axis=0) - pad, corners.max(axis=0) + pad


def _cells_hit(merged, delta) -> int:
    """Number of grid cells [kδ, (k+1)δ) met by a sorted disjoint union of intervals."""
    count = 0
    last = None  # highest cell index counted so far
    for a, b in merged:
        k_lo = math.floor(a / delta + CELL_EPS)
        k_hi = max(k_lo, math.ceil(b / delta - CELL_EPS) - 1)
        if last is not None and k_lo <= last:
            k_lo = last + 1
        if k_hi >= k_lo:
            count += k_hi - k_lo + 1
            last = k_hi
    return count


@dataclass(frozen=True)
class ImageCover:
    delta: float
    intervals: list
    count: int
    rectangles: int


def image_cover(fmap, pair, delta, budget=DEFAULT_BUDGET, boxes=None) -> ImageCover:
    boxes = _cover_boxes(pair, delta, budget) if boxes is None else boxes
    lo, hi = _image_intervals(fmap, boxes)
    merged = interval_union(np.column_stack([lo, hi]), tol=TOUCH_TOL)
    return ImageCover(delta, merged, _cells_hit(merged, delta), len(lo))


def image_cover_counts(fmap, pair, deltas, budget=DEFAULT_BUDGET) -> list:
    """[(δ, N(δ))] where N counts δ-cells met by the image of the cylinder-rectangle cover."""
    return [(d, image_cover(fmap, pair, d, budget).count) for d in deltas]


def gradient_condition_check(fmap, pair, delta, c0=2.0, tol=WITNESS_TOL, budget=DEFAULT_BUDGET):
    """First rectangle center where both partials exceed ``tol``; None if there is none."""
    x0, x1, y0, y1 = _cover_boxes(pair, delta, budget)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    gx, gy = fmap.gradient(cx, cy)
    ok = (np.abs(gx) > tol) & (np.abs(gy) > tol)
    if not ok.any():
        return None
    i = int(np.argmax(ok))
    return (float(cx[i]), float(cy[i])), (float(gx[i]), float(gy[i]))


# -- scans ------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    s: float
    slope: float
    residual: float
    counts: tuple
    flagged: bool


def dimension_scan(map_family, s_grid, pair, deltas, target, tol=0.1, fit_scales=FIT_SCALES, budget=DEFAULT_BUDGET, threads=1) -> list:
    """Fitted box dimension of f_s(K × K′) for each s, flagging |slope − target| > tol.

    ``map_family`` is a callable s ↦ map.  The slope uses the ``fit_scales`` finest δ.
    """
    deltas = sorted(float(d) for d in deltas)[::-1]
    if len(deltas) < 3:
        raise ValueError("need at least three scales")
    boxes = {d: _cover_boxes(pair, d, budget) for d in deltas}

    def one(s):
        fmap = map_family(s)
        counts = tuple((d, image_cover(fmap, pair, d, boxes=boxes[d]).count) for d in deltas)
        slope, resid = box_dimension_estimate(counts[-fit_scales:])
        return ScanRow(float(s), slope, resid, counts, abs(slope - target) > tol)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, s_grid))
    return [one(s) for s in s_grid]


def j_r_grid(R: float, points: int) -> np.ndarray:
    """``points`` values of J_R = [−R, −1/R] ∪ [1/R, R], log-spaced in |s|, half of each sign."""
    neg = points // 2
    pos = points - neg
    return np.concatenate([-np.geomspace(R, 1.0 / R, neg), np.geomspace(1.0 / R, R, pos)])
