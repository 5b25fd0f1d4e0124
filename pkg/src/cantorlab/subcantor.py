"""Extraction of a regular sub-Cantor set whose dimension lies in a prescribed window (a, b).

Blocks are words of n symbols that start with a marker c̃ and end with a marker d̃,
where (d̃, c̃) is an allowed transition, so blocks concatenate freely.  A block y
acts through its own n − 1 branches followed by the junction branch (d̃, c̃), which
is why its derivative bounds are those of the word ``y + (c̃,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dimension import DimensionBracket, pressure_dimension
from .errors import BudgetExceeded, DistortionTooWeak, TargetAboveDimension
from .jets import simplify_composition
from .symbolic import DEFAULT_BUDGET, enumerate_words
from .system import (
    CantorSystem,
    _count_words,
    bounded_distortion_estimate,
    derivative_bounds_on_cylinder,
    make_system,
)

SAFETY = 0.9
AUDIT_DEPTH = 8
TARGET_TOL = 1e-9
MAX_BLOCK = 40


@dataclass(frozen=True)
class SubCantorResult:
    n: int
    markers: tuple  # (c̃, d̃)
    kept: list
    pivot: tuple
    c_hat: float
    kept_sum: float
    pivot_sum: float
    sum_a: float
    sum_lower: float
    system: CantorSystem
    bracket: DimensionBracket
    a: float
    b: float
    parent: CantorSystem = field(repr=False, default=None)

    def recheck(self) -> dict:
        """Recompute the four stopping inequalities from scratch."""
        base = self.parent
        mid = 0.5 * (self.a + self.b)
        c = self.markers[0]
        bounds = [derivative_bounds_on_cylinder(base, y + (c,)) for y in self.kept]
        lam_p = derivative_bounds_on_cylinder(base, self.pivot + (c,))[1]
        kept = math.fsum(L ** -mid for _, L in bounds)
        return {
            "kept_le_c_hat": kept <= self.c_hat,
            "with_pivot_gt_c_hat": kept + lam_p ** -mid > self.c_hat,
            "sum_a_gt_1": math.fsum(L ** -self.a for _, L in bounds) > 1.0,
            "sum_lower_lt_1": math.fsum(lo ** -mid for lo, _ in bounds) < 1.0,
        }


def block_label(word) -> str:
    return ".".join(str(a) for a in word)


def markers(system: CantorSystem) -> tuple:
    """(c̃, d̃) from the first allowed transition (d̃, c̃) in lexicographic order."""
    for d in system.spec.alphabet:
        for c in system.spec.alphabet:
            if (d, c) in system.spec.transitions:
                return c, d
    raise AssertionError("a mixing shift has transitions")


def block_system(system: CantorSystem, blocks, c_marker) -> CantorSystem:
    """Full shift over ``blocks`` with expanding map gⁿ, realized inside ``system``."""
    blocks = [tuple(y) for y in blocks]
    labels = [block_label(y) for y in blocks]
    d_marker = blocks[0][-1]
    junction = system.branches[(d_marker, c_marker)].primitive
    base = {lab: system.cylinder_interval(y) for lab, y in zip(labels, blocks)}
    prims = {}
    for lab, y in zip(labels, blocks):
        outer = [br.primitive for br in reversed(system.chain(y))]  # outermost first
        f = simplify_composition(outer + [junction])
        for lab2 in labels:
            prims[(lab, lab2)] = f
    trans = [(p, q) for p in labels for q in labels]
    return make_system(labels, trans, base, prims, name=f"blocks({system.name},n={len(blocks[0])})")


def extract_subcantor(system: CantorSystem, a: float, b: float, budget: int = DEFAULT_BUDGET,
                      audit_depth: int = AUDIT_DEPTH, safety: float = SAFETY, max_block: int = MAX_BLOCK) -> SubCantorResult:
    """Sub-Cantor set K̃ ⊆ K with a < HD(K̃) < b."""
    if not 0 <= a < b:
        raise ValueError("need 0 <= a < b")
    d_audit = pressure_dimension(system, audit_depth, budget).d_lower
    if b > d_audit + TARGET_TOL:
        raise TargetAboveDimension(f"b={b} exceeds the certified lower dimension {d_audit:.12g}")
    c_mark, d_mark = markers(system)
    eps = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    lam1 = system.expansion_constant
    attempts = []
    # ĉ ≤ 1, so λ₁^{nε} > 2/ĉ needs at least λ₁^{nε} > 2
    n_start = max(2, math.floor(math.log(2.0) / (eps * math.log(lam1))) + 1)
    for n in range(n_start, max_block + 1):
        if _count_words(system.spec, n + 1) > budget:
            break
        c_hat = safety * bounded_distortion_estimate(system, n, budget)
        d_n = pressure_dimension(system, n, budget).d_lower
        if d_n <= mid + eps / 2 or lam1 ** (n * eps) <= 2.0 / c_hat:
            continue
        X = [w for w in enumerate_words(system.spec, n, starts=(c_mark,)) if w[-1] == d_mark]
        bounds = np.array([derivative_bounds_on_cylinder(system, w + (c_mark,)) for w in X])
        weights = bounds[:, 1] ** -mid
        if math.fsum(weights) <= c_hat:
            continue
        # remove largest Λ first; ties in lexicographic order
        order = sorted(range(len(X)), key=lambda i: (-bounds[i, 1], i))
        keep = np.ones(len(X), dtype=bool)
        total = math.fsum(weights)
        pivot = None
        for i in order:
            keep[i] = False
            total = math.fsum(weights[keep])
            if total <= c_hat:
                pivot = i
                break
        kept_idx = np.flatnonzero(keep)
        if pivot is None or kept_idx.size == 0:
            attempts.append((n, "greedy removal emptied the block set"))
            continue
        kept_sum = math.fsum(weights[kept_idx])
        sum_a = math.fsum(bounds[kept_idx, 1] ** -a)
        sum_lower = math.fsum(bounds[kept_idx, 0] ** -mid)
        checks = (kept_sum <= c_hat, kept_sum + weights[pivot] > c_hat, sum_a > 1.0, sum_lower < 1.0)
        if not all(checks):
            attempts.append((n, dict(kept_sum=kept_sum, c_hat=c_hat, sum_a=sum_a, sum_lower=sum_lower)))
            continue
        kept = [X[i] for i in kept_idx]
        sub = block_system(system, kept, c_mark)
        # two blocks deep when the word count allows, one otherwise
        depth = 2 if len(kept) ** 3 <= budget else 1
        bracket = pressure_dimension(sub, depth, budget)
        return SubCantorResult(n, (c_mark, d_mark), kept, X[pivot], c_hat, kept_sum,
                               kept_sum + float(weights[pivot]), sum_a, sum_lower, sub, bracket, a, b, system)
    if attempts:
        raise DistortionTooWeak("post-conditions could not be verified within the budget", attempts)
    raise BudgetExceeded(f"no block length up to the budget satisfies the size conditions for ({a}, {b})")
