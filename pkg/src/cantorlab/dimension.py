"""Hausdorff-dimension brackets, box-counting slopes and the mass-distribution certifier."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import BudgetExceeded, DegenerateScales, NestingViolated
from .symbolic import DEFAULT_BUDGET, enumerate_words
from .system import CantorSystem, _count_words, _derivative_bounds

BISECT_XTOL = 1e-13
NESTING_TOL = 1e-12


@dataclass(frozen=True)
class DimensionBracket:
    depth: int
    d_lower: float
    d_upper: float
    residual: float = 0.0

    @property
    def width(self) -> float:
        return self.d_upper - self.d_lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.d_lower + self.d_upper)

    def contains(self, other: "DimensionBracket", tol: float = 1e-9) -> bool:
        return self.d_lower - tol <= other.d_lower and other.d_upper <= self.d_upper + tol


class _WeightedTransfer:
    """d ↦ spectral radius of the symbol-to-symbol matrix Σ_w exp(−d·log L_w)."""

    def __init__(self, n_symbols, rows, cols, log_weights):
        self.n = n_symbols
        self.rows = rows
        self.cols = cols
        self.log_weights = log_weights

    def radius(self, d):
        m = np.zeros((self.n, self.n))
        np.add.at(m, (self.rows, self.cols), np.exp(-d * self.log_weights))
        return float(np.max(np.abs(np.linalg.eigvals(m))))

    def root(self):
        f = lambda d: self.radius(d) - 1.0  # noqa: E731
        if f(0.0) <= 0.0:
            return 0.0, abs(f(0.0))
        hi = 2.0
        while f(hi) > 0.0:
            hi *= 2.0
            if hi > 64:
                raise ArithmeticError("pressure root not bracketed")
        d = bisect(f, 0.0, hi, xtol=BISECT_XTOL)
        return d, abs(f(d))


def pressure_dimension(system: CantorSystem, depth: int, budget: int = DEFAULT_BUDGET) -> DimensionBracket:
    """Dimension bracket from the depth-n pressure equation.

    Every word w of n + 1 symbols contributes ``Λ_w^{−d}`` (resp. ``λ_w^{−d}``) to the
    entry (w0, wn) of a symbol matrix.  Sup-derivatives are submultiplicative under
    concatenation, so the matrix whose spectral radius equals 1 at ``d_lower`` bounds
    the pressure from below; the inf-derivative matrix gives ``d_upper`` symmetrically.
    For one-symbol full shifts the matrix is the scalar sum Σ Λ^{−d}.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    count = _count_words(system.spec, depth + 1)
    if count > budget:
        raise BudgetExceeded(f"depth {depth} needs {count} words (budget {budget})")
    spec = system.spec
    words = enumerate_words(spec, depth + 1)
    rows = np.array([spec.index(w[0]) for w in words])
    cols = np.array([spec.index(w[-1]) for w in words])
    bounds = np.array([_derivative_bounds(system, w) for w in words])
    n = len(spec.alphabet)
    d_lower, res_lo = _WeightedTransfer(n, rows, cols, np.log(bounds[:, 1])).root()
    d_upper, res_hi = _WeightedTransfer(n, rows, cols, np.log(bounds[:, 0])).root()
    return DimensionBracket(depth, d_lower, d_upper, max(res_lo, res_hi))


def bracket_sequence(system: CantorSystem, depths, budget: int = DEFAULT_BUDGET) -> list:
    return [pressure_dimension(system, n, budget) for n in depths]


def box_dimension_estimate(cover_counts) -> tuple:
    """Least-squares slope of log N(δ) against log(1/δ), and the max absolute residual."""
    pairs = [(float(d), float(n)) for d, n in cover_counts]
    if len({d for d, _ in pairs}) < 3:
        raise DegenerateScales("need at least three distinct scales")
    if any(n < 1 for _, n in pairs):
        raise ValueError("cover counts must be >= 1")
    x = np.array([math.log(1.0 / d) for d, _ in pairs])
    y = np.array([math.log(n) for _, n in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.max(np.abs(resid)))


# -- mass distribution --------------------------------------------------------


@dataclass(frozen=True)
class MassCertificate:
    certified: bool
    d: float
    levels: int
    min_ratio_sum: float
    max_length_ratio: float
    violation: tuple | None = None  # (level, parent index, ratio sum)


def mass_distribution_certify(nested_families, d: float, tol: float = 1e-12) -> MassCertificate:
    """Check Σ (|I'|/|I|)^d ≥ 1 below every node of a nested family of intervals.

    ``nested_families[r]`` is the list of disjoint closed intervals at level r; each
    interval of level r + 1 must sit inside one interval of level r.  If every node
    passes, the limit set has Hausdorff dimension at least ``d``.
    """
    levels = [sorted((float(a), float(b)) for a, b in fam) for fam in nested_families]
    for r, fam in enumerate(levels):
        for (a1, b1), (a2, b2) in zip(fam, fam[1:]):
            if b1 >= a2:
                raise NestingViolated(f"level {r}: intervals {(a1, b1)} and {(a2, b2)} overlap")
    min_sum = math.inf
    max_ratio = 1.0
    violation = None
    for r in range(len(levels) - 1):
        parents, children = levels[r], levels[r + 1]
        starts = np.array([a for a, _ in parents])
        sums = np.zeros(len(parents))
        for a, b in children:
            k = int(np.searchsorted(starts, a, side="right")) - 1
            if k < 0 or not (parents[k][0] - NESTING_TOL <= a and b <= parents[k][1] + NESTING_TOL):
                raise NestingViolated(f"level {r + 1}: interval {(a, b)} is not inside a level-{r} interval")
            plen = parents[k][1] - parents[k][0]
            sums[k] += ((b - a) / plen) ** d
            max_ratio = max(max_ratio, plen / (b - a))
        for k, total in enumerate(sums):
            min_sum = min(min_sum, total)
            if violation is None and total < 1.0 - tol:
                violation = (r, k, float(total))
    return MassCertificate(violation is None, d, len(levels), float(min_sum), float(max_ratio), violation)


def cylinder_tree(system: CantorSystem, levels: int, step: int = 1, start=None) -> list:
    """Nested cylinder families: level r holds the cylinders of words with r·step + 1 symbols.

    ``start`` restricts to words beginning with one symbol, so that the root level is a
    single interval.
    """
    spec = system.spec
    starts = None if start is None else (start,)
    return [
        [system.cylinder_interval(w) for w in enumerate_words(spec, r * step + 1, starts=starts)]
        for r in range(levels + 1)
    ]
