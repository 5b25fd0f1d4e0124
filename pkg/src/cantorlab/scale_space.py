"""Relative scales (θ, θ′, s), their renormalization, relative projections and good-scale tests.

Lengths are measured relative to the base interval of the first symbol, so the
formulas reduce to the textbook ones when every base interval has length 1.  The
unprimed operator of a word a sends s to ε·s·|I(aₙ)| / |I^θ(a)|, the primed one
sends s to ε′·s·|I′^{θ′}(a′)| / |I′(a′ₙ)|, where ε is the orientation of f_a and
I^θ(a) is the image of I(a) under the limit geometry of θ.  Limit geometries use
the whole stored tail, so renormalizing by u then v lands on exactly the same
composition as renormalizing by their concatenation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .dimension import pressure_dimension
from .errors import EmptyScale, InadmissibleJoin
from .limit_geometry import limit_geometry
from .marstrand import as_arrays, count_overlaps, delta_rectangles
from .symbolic import DEFAULT_BUDGET, greedy_extension, greedy_tail, words_at_scale
from .system import CantorSystem

DEFAULT_TAIL_DEPTH = 8
MAX_TAIL = 64
BASEPOINT_DEPTH = 24
DEFAULT_R = 4.0
DEFAULT_M = 3
DEFAULT_ALPHA = 1.0


@dataclass(frozen=True)
class RelativeScale:
    tail: tuple
    tail2: tuple
    s: float

    def __post_init__(self):
        if self.s == 0 or not math.isfinite(self.s):
            raise ValueError("relative scale s must be finite and nonzero")
        object.__setattr__(self, "tail", tuple(self.tail))
        object.__setattr__(self, "tail2", tuple(self.tail2))

    def in_window(self, R: float = DEFAULT_R) -> bool:
        return in_j_r(self.s, R)


def in_j_r(s: float, R: float) -> bool:
    """s ∈ J_R = [−R, −1/R] ∪ [1/R, R]."""
    return 1.0 / R <= abs(s) <= R


def default_tail(system: CantorSystem, symbol, depth: int = DEFAULT_TAIL_DEPTH) -> tuple:
    return greedy_tail(system.spec, symbol, depth + 1)


@dataclass(frozen=True)
class BasepointChoice:
    words: dict
    points: dict


def default_basepoints(system: CantorSystem, depth: int = BASEPOINT_DEPTH) -> BasepointChoice:
    """ω(a) is the lexicographically smallest admissible forward extension of a."""
    words, points = {}, {}
    for a in system.spec.alphabet:
        w = greedy_extension(system.spec, a, depth + 1)
        lo, hi = system.cylinder_interval(w)
        words[a] = w
        points[a] = 0.5 * (lo + hi)
    return BasepointChoice(words, points)


def _geometry(system, tail):
    return limit_geometry(system, tail, len(tail) - 1)


def relative_length(system: CantorSystem, tail, word) -> float:
    """|I^θ(word)| / |I(θ₀)|."""
    return _geometry(system, tail).length_of(word) / system.base_length(tail[-1])


def _check_join(system, tail, word):
    word = tuple(word)
    if not system.spec.is_admissible(word):
        raise InadmissibleJoin(f"word {word} is not admissible")
    if word[0] != tail[-1]:
        raise InadmissibleJoin(f"word {word} does not start with the tail's last symbol {tail[-1]!r}")
    return word


def renormalize(system: CantorSystem, point: RelativeScale, word, primed: bool = False, max_tail: int = MAX_TAIL) -> RelativeScale:
    """Apply T_word (or T′_word with ``primed``) to the relative scale ``point``."""
    tail = point.tail2 if primed else point.tail
    word = _check_join(system, tail, word)
    eps = system.orientation(word)
    ratio = relative_length(system, tail, word)  # |I^θ(a)| / |I(a₀)|
    scale = system.base_length(word[-1]) / system.base_length(word[0])  # |I(aₙ)| / |I(a₀)|
    new_tail = (tail + word[1:])[-max_tail:]
    if primed:
        return replace(point, tail2=new_tail, s=eps * point.s * ratio / scale)
    return replace(point, tail=new_tail, s=eps * point.s * scale / ratio)


def renormalize_pair(pair, point: RelativeScale, word, word2, max_tail: int = MAX_TAIL) -> RelativeScale:
    """T_word T′_word2 (the two operators commute)."""
    point = renormalize(pair[0], point, word, False, max_tail)
    return renormalize(pair[1], point, word2, True, max_tail)


# -- relative projections -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class LimitEmbedding:
    """x ↦ (k^θ(x) − k^θ(p)) / |I(θ₀)|, applied to cylinders starting with θ₀."""

    system: CantorSystem
    tail: tuple
    basepoint: float

    def _parts(self):
        g = _geometry(self.system, self.tail)
        return g, g.value(self.basepoint), self.system.base_length(self.tail[-1])

    def __call__(self, x):
        g, kp, size = self._parts()
        return (g.value(x) - kp) / size

    def interval(self, system, word):
        g, kp, size = self._parts()
        lo, hi = g.image_of(word)
        return ((lo - kp) / size, (hi - kp) / size)

    def length(self, system, word):
        return relative_length(self.system, self.tail, word)


def embeddings_for(pair, point: RelativeScale, basepoints=None):
    bp1, bp2 = basepoints or (default_basepoints(pair[0]), default_basepoints(pair[1]))
    return (
        LimitEmbedding(pair[0], point.tail, bp1.points[point.tail[-1]]),
        LimitEmbedding(pair[1], point.tail2, bp2.points[point.tail2[-1]]),
    )


def relative_projection(pair, point: RelativeScale, x, x2, basepoints=None):
    """t = π_{θ,θ′,s}(x, x′) with both limit geometries rescaled to unit base intervals."""
    e1, e2 = embeddings_for(pair, point, basepoints)
    return e1(x) - point.s * e2(x2)


# -- good scales ----------------------------------------------------------------


@lru_cache(maxsize=256)
def _dimension_midpoint(system, depth):
    return pressure_dimension(system, depth).midpoint


def pair_dimension(pair, depth: int = 6) -> float:
    return _dimension_midpoint(pair[0], depth) + _dimension_midpoint(pair[1], depth)


def _relative_words(system, rho, c0, start, budget):
    size = system.base_length(start)
    return words_at_scale(system, rho, c0, length_fn=lambda w: system.cylinder_length(w) / size, starts=(start,), budget=budget)


def overlap_count_at(pair, point: RelativeScale, delta, c0=2.0, basepoints=None, budget=DEFAULT_BUDGET) -> int:
    """N_δ(θ, θ′, s): overlaps of the relative configuration's δ-rectangles under π_s."""
    emb = embeddings_for(pair, point, basepoints)
    rects = delta_rectangles(pair, delta, c0, emb, starts=((point.tail[-1],), (point.tail2[-1],)), budget=budget)
    return count_overlaps(as_arrays(rects), point.s)


@dataclass(frozen=True)
class GoodScaleResult:
    condition1: bool
    condition2: bool
    count1: int
    bound1: float
    sums2: tuple  # per ρ̂: (ρ̂, Σ N, bound)
    c5: float
    dims: float

    @property
    def good(self) -> bool:
        return self.condition1 and self.condition2


def good_scale_indicator(pair, point: RelativeScale, rho, m=DEFAULT_M, c5=None, c0=2.0, dims=None, basepoints=None, budget=DEFAULT_BUDGET) -> GoodScaleResult:
    """Conditions (1) and (2) at scale ρ, with N evaluated at scale ρ^{1/m}."""
    if m < 3:
        raise ValueError("m must be >= 3")
    if c5 is None:
        raise ValueError("c5 must be given (see calibrate_c5)")
    D = pair_dimension(pair) if dims is None else dims
    basepoints = basepoints or (default_basepoints(pair[0]), default_basepoints(pair[1]))
    delta = rho ** (1.0 / m)
    n1 = overlap_count_at(pair, point, delta, c0, basepoints, budget)
    bound1 = c5 * rho ** (-D / m)
    sums = []
    cond2 = True
    for j in range(1, m):
        rho_hat = rho ** (j / m)
        w1 = _relative_words(pair[0], rho_hat, c0, point.tail[-1], budget)
        w2 = _relative_words(pair[1], rho_hat, c0, point.tail2[-1], budget)
        total = 0
        for b in w1:
            p1 = renormalize(pair[0], point, b)
            for b2 in w2:
                total += overlap_count_at(pair, renormalize(pair[1], p1, b2, primed=True), delta, c0, basepoints, budget)
        bound = c5 * rho_hat ** (-D) * rho ** (-D / m)
        sums.append((rho_hat, total, bound))
        cond2 = cond2 and total <= bound
    return GoodScaleResult(n1 <= bound1, cond2, n1, bound1, tuple(sums), c5, D)


def calibrate_c5(pair, tails, rho, s_grid, m=DEFAULT_M, factor=4.0, c0=2.0, dims=None, budget=DEFAULT_BUDGET) -> float:
    """``factor`` times the largest normalized count of either condition over the grid."""
    D = pair_dimension(pair) if dims is None else dims
    probe = good_scale_indicator
    worst = 0.0
    for tail, tail2 in tails:
        for s in s_grid:
            res = probe(pair, RelativeScale(tail, tail2, float(s)), rho, m, 1.0, c0, D, budget=budget)
            worst = max(worst, res.count1 / res.bound1, *(t / b for _, t, b in res.sums2))
    return factor * worst


# -- recurrence -------------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceRow:
    symbol: object
    symbol2: object
    s: float
    good: bool
    fraction: float | None  # None when s is not good


@dataclass(frozen=True)
class RecurrenceReport:
    rho: float
    rows: list
    tail_fraction: dict = field(default_factory=dict)  # mean fraction per tail pair, 0.0 if no good s


def empirical_recurrence_map(pair, rho, s_grid, m=DEFAULT_M, c5=None, R=DEFAULT_R, c0=2.0, tail_depth=DEFAULT_TAIL_DEPTH, dims=None, budget=DEFAULT_BUDGET) -> RecurrenceReport:
    """How often renormalizing a good scale lands near a good scale of the target tail pair.

    One representative tail per pair of final symbols is used.  For each good grid
    point s and each (b, b′) ∈ Σ(ρ) × Σ′(ρ) joining the tails, the renormalized scale
    counts as a return if it lies in J_R within ρ of a good grid point of the
    target tail pair.
    """
    sys1, sys2 = pair
    s_grid = np.asarray(s_grid, dtype=float)
    tails = {(a, a2): (default_tail(sys1, a, tail_depth), default_tail(sys2, a2, tail_depth))
             for a in sys1.spec.alphabet for a2 in sys2.spec.alphabet}
    words1 = {a: _relative_words(sys1, rho, c0, a, budget) for a in sys1.spec.alphabet}
    words2 = {a: _relative_words(sys2, rho, c0, a, budget) for a in sys2.spec.alphabet}
    if not any(words1.values()) or not any(words2.values()):
        raise EmptyScale(f"Sigma(rho) is empty at rho={rho}")
    D = pair_dimension(pair) if dims is None else dims
    good = {}
    for key, (t1, t2) in tails.items():
        good[key] = np.array([
            good_scale_indicator(pair, RelativeScale(t1, t2, s), rho, m, c5, c0, D, budget=budget).good for s in s_grid
        ])
    rows = []
    summary = {}
    for key, (t1, t2) in tails.items():
        fracs = []
        for s, ok in zip(s_grid, good[key]):
            if not ok:
                rows.append(RecurrenceRow(key[0], key[1], float(s), False, None))
                continue
            hits = total = 0
            point = RelativeScale(t1, t2, float(s))
            for b in words1[key[0]]:
                p1 = renormalize(sys1, point, b)
                for b2 in words2[key[1]]:
                    target = renormalize(sys2, p1, b2, primed=True)
                    total += 1
                    targets = s_grid[good[(b[-1], b2[-1])]]
                    if in_j_r(target.s, R) and targets.size and np.min(np.abs(targets - target.s)) <= rho:
                        hits += 1
            frac = hits / total if total else 0.0
            fracs.append(frac)
            rows.append(RecurrenceRow(key[0], key[1], float(s), True, frac))
        summary[key] = float(np.mean(fracs)) if fracs else 0.0
    return RecurrenceReport(rho, rows, summary)
