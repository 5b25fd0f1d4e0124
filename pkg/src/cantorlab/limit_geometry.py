"""Limit geometries, their affine functional equation, the (H′1) profile and eigenvalue ratios.

A tail is a finite tuple ``(θ_{−n}, …, θ_{−1}, θ_0)``; its last entry is θ_0.  The
depth-D map of a tail composes the branches of the word ``tail[-(D+1):]`` (a map from
I(θ_0) into I(θ_{−D})) and rescales the image back onto I(θ_0) by the orientation
preserving affine map.  Values and lengths are computed from branch differences, so
no digits are lost however small the underlying cylinder is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DepthExceedsTail, TailMismatch
from .jets import Jet2
from .symbolic import enumerate_words
from .system import CantorSystem, periodic_point

NEWTON_TOL = 1e-15
MAX_DENOMINATOR = 10**6


@dataclass(frozen=True, eq=False)
class LimitGeometry:
    system: CantorSystem
    tail: tuple
    depth: int
    residual: float

    @property
    def symbol(self):
        return self.tail[-1]

    @property
    def word(self) -> tuple:
        return self.tail[len(self.tail) - self.depth - 1:]

    @property
    def interval(self) -> tuple:
        return self.system.base_intervals[self.symbol]

    @property
    def _scale(self) -> float:
        lo, hi = self.interval
        # (hi − lo) / (F(hi) − F(lo)), positive or negative with the orientation of F
        return (hi - lo) / self.system.push(self.word, lo, hi - lo)[1]

    def diff(self, x, h):
        """k(x + h) − k(x)."""
        return self._scale * self.system.push(self.word, x, h)[1]

    def value(self, x):
        lo = self.interval[0]
        return lo + self.diff(lo, np.asarray(x, dtype=float) - lo)

    def jet(self, x) -> Jet2:
        x = np.asarray(x, dtype=float)
        jet = self.system.word_jet(self.word, x)
        c = self._scale
        return Jet2(self.value(x), c * jet.d1, c * jet.d2)

    def length_of(self, word) -> float:
        """|k(I(word))| for a word starting with θ_0."""
        word = tuple(word)
        if word[0] != self.symbol:
            raise ValueError(f"word {word} does not start with {self.symbol!r}")
        lo, hi = self.system.base_intervals[word[-1]]
        return abs(self._scale * self.system.push(self.word + word[1:], lo, hi - lo)[1])

    def image_of(self, word) -> tuple:
        """k(I(word)) as a closed interval."""
        word = tuple(word)
        lo_n, hi_n = self.system.base_intervals[word[-1]]
        base = self.interval[0]
        full = self.word + word[1:]
        p = self.system.push(self.word, base, 0.0)[0]
        a, h = self.system.push(full, lo_n, hi_n - lo_n)
        # k(y) = base + c·(F(y) − F(base)); F(y) − p is a short difference of nearby points
        start = base + self._scale * (a - p)
        end = start + self._scale * h
        return (min(start, end), max(start, end))

    def inverse(self, y, tol=NEWTON_TOL, max_iter=200):
        """Solve k(x) = y by Newton steps kept inside a shrinking bracket."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        lo0, hi0 = self.interval
        lo = np.full_like(y, lo0)
        hi = np.full_like(y, hi0)
        x = lo0 + (y - lo0)  # k is close to the identity
        x = np.clip(x, lo0, hi0)
        for _ in range(max_iter):
            jet = self.jet(x)
            f = jet.value - y
            lo = np.where(f < 0, x, lo)
            hi = np.where(f > 0, x, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = x - f / jet.d1
            outside = ~((step > lo) & (step < hi)) | ~np.isfinite(step)
            nx = np.where(outside, 0.5 * (lo + hi), step)
            if np.all(np.abs(nx - x) <= tol * max(1.0, abs(hi0))):
                x = nx
                break
            x = nx
        return x


def _max_c1(g1: LimitGeometry, g2: LimitGeometry, grid) -> float:
    j1, j2 = g1.jet(grid), g2.jet(grid)
    return float(np.max(np.abs(j1.value - j2.value)) + np.max(np.abs(j1.d1 - j2.d1)))


def c1_distance(g1: LimitGeometry, g2: LimitGeometry, grid=None) -> float:
    """sup |k1 − k2| + sup |k1′ − k2′| over the grid."""
    if g1.symbol != g2.symbol:
        raise TailMismatch("maps act on different base intervals")
    grid = equispaced_grid(g1.system, g1.symbol) if grid is None else np.asarray(grid, dtype=float)
    return _max_c1(g1, g2, grid)


def equispaced_grid(system: CantorSystem, symbol, points: int = 101) -> np.ndarray:
    lo, hi = system.base_intervals[symbol]
    return np.linspace(lo, hi, points)


def default_audit_grid(system: CantorSystem, symbol, points: int = 101, cover_depth: int = 6) -> np.ndarray:
    """Equispaced points of I(symbol), each moved to the nearest depth-``cover_depth`` cylinder."""
    grid = equispaced_grid(system, symbol, points)
    cyl = np.array([system.cylinder_interval(w) for w in enumerate_words(system.spec, cover_depth + 1, starts=(symbol,))])
    cyl = cyl[np.argsort(cyl[:, 0])]
    # distance from each point to each cylinder, then clip into the closest one
    dist = np.maximum(cyl[None, :, 0] - grid[:, None], 0.0) + np.maximum(grid[:, None] - cyl[None, :, 1], 0.0)
    k = np.argmin(dist, axis=1)
    snapped = np.clip(grid, cyl[k, 0], cyl[k, 1])
    return np.unique(snapped)


def _check_tail(system: CantorSystem, tail, depth: int):
    tail = tuple(tail)
    if not tail:
        raise ValueError("tail must be nonempty")
    system.check_word(tail)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > len(tail) - 1:
        raise DepthExceedsTail(f"depth {depth} needs a tail of {depth + 1} symbols, got {len(tail)}")
    return tail


def limit_geometry(system: CantorSystem, tail, depth: int) -> LimitGeometry:
    """The depth-``depth`` map of ``tail`` with its residual against depth − 1."""
    tail = _check_tail(system, tail, depth)
    return _cached_geometry(system, tail, depth)


@lru_cache(maxsize=4096)
def _cached_geometry(system, tail, depth):
    residual = 0.0
    if depth > 0:
        raw = LimitGeometry(system, tail, depth, 0.0)
        prev = LimitGeometry(system, tail, depth - 1, 0.0)
        residual = _max_c1(raw, prev, equispaced_grid(system, tail[-1]))
    return LimitGeometry(system, tail, depth, residual)


def residual_sequence(system: CantorSystem, tail, depths, step: int = 2, grid=None) -> list:
    """r(n) = C¹ distance between the depth-n and depth-(n + step) maps."""
    out = []
    for n in depths:
        g1 = limit_geometry(system, tail, n)
        g2 = limit_geometry(system, tail, n + step)
        out.append(c1_distance(g1, g2, grid))
    return out


@dataclass(frozen=True)
class AffineRelationReport:
    n: int
    depth: int
    residual: float
    truncation_residuals: tuple

    @property
    def within_truncation(self) -> bool:
        return self.residual <= sum(self.truncation_residuals)


def check_affine_relation(system: CantorSystem, tail, n: int, grid=None, depth: int = 10) -> AffineRelationReport:
    """Compare F_n ∘ k^θ with k^{σ^{−n}θ} ∘ f_{θⁿ}, both limit maps at the same depth.

    θⁿ = (θ_{−n}, …, θ_0) and σ^{−n}θ is the tail cut just after θ_{−n}.  F_n is the
    affine map of I(θ_0) onto the image of I(θ_0) under the right-hand side,
    matching the orientation of f_{θⁿ}.
    """
    tail = tuple(tail)
    if len(tail) < depth + n + 1:
        raise DepthExceedsTail(f"need {depth + n + 1} tail symbols, got {len(tail)}")
    k = limit_geometry(system, tail, depth)
    grid = equispaced_grid(system, tail[-1], 50) if grid is None else np.asarray(grid, dtype=float)
    if n == 0:
        return AffineRelationReport(0, depth, 0.0, (k.residual, k.residual))
    shifted = tail[:-n]
    k_s = limit_geometry(system, shifted, depth)
    word = tail[-(n + 1):]
    lo, hi = k.interval

    def rhs(x):
        return k_s.value(system.push(word, x, 0.0)[0])

    r_lo, r_hi = rhs(lo), rhs(hi)
    lhs = r_lo + (r_hi - r_lo) * (k.value(grid) - lo) / (hi - lo)
    residual = float(np.max(np.abs(lhs - rhs(grid))))
    return AffineRelationReport(n, depth, residual, (k.residual, k_s.residual))


# -- (H′1) --------------------------------------------------------------------


@dataclass(frozen=True)
class HPrimeOneProfile:
    grid: np.ndarray
    values: np.ndarray
    depth: int
    residuals: tuple

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def h_prime_one_profile(system: CantorSystem, tail0, tail1, grid=None, depth: int = 12) -> HPrimeOneProfile:
    """φ″/φ′ for φ = k^{θ¹} ∘ (k^{θ⁰})⁻¹ at the grid points.

    With y = (k^{θ⁰})⁻¹(x), a = jet of k^{θ⁰} at y and b = jet of k^{θ¹} at y,
    φ″/φ′(x) = b2 / (b1·a1) − a2 / a1².
    """
    tail0, tail1 = tuple(tail0), tuple(tail1)
    if tail0[-1] != tail1[-1]:
        raise TailMismatch(f"tails end in {tail0[-1]!r} and {tail1[-1]!r}")
    k0 = limit_geometry(system, tail0, depth)
    k1 = limit_geometry(system, tail1, depth)
    grid = default_audit_grid(system, tail0[-1]) if grid is None else np.asarray(grid, dtype=float)
    if tail0[-(depth + 1):] == tail1[-(depth + 1):]:
        return HPrimeOneProfile(grid, np.zeros_like(grid), depth, (k0.residual, k1.residual))
    y = k0.inverse(grid)
    a = k0.jet(y)
    b = k1.jet(y)
    values = b.d2 / (b.d1 * a.d1) - a.d2 / a.d1**2
    return HPrimeOneProfile(grid, np.asarray(values, dtype=float), depth, (k0.residual, k1.residual))


# -- eigenvalue ratios --------------------------------------------------------


def convergents(x: float, max_denominator: int = MAX_DENOMINATOR) -> list:
    """Continued-fraction convergents (p, q) of the float ``x`` with q ≤ max_denominator."""
    r = Fraction(x)
    out = []
    p0, q0, p1, q1 = 1, 0, math.floor(r), 1
    out.append((p1, q1))
    frac = r - math.floor(r)
    while frac != 0:
        r = 1 / frac
        a = math.floor(r)
        frac = r - a
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_denominator:
            break
        out.append((p1, q1))
    return out


@dataclass(frozen=True)
class RatioEntry:
    words: tuple
    eigenvalues: tuple
    ratio: float
    convergents: list
    denominator_for_tol: int | None  # first q with |ratio − p/q| ≤ tol, if ≤ max denominator


def eigenvalue_ratio_report(system: CantorSystem, words, tol: float = 1e-12, max_denominator: int = MAX_DENOMINATOR) -> list:
    """For each pair i < j of periodic words: log|μ_j| / log|μ_i| and its convergents."""
    words = [tuple(w) for w in words]
    eig = [periodic_point(system, w)[1] for w in words]
    out = []
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            ratio = math.log(abs(eig[j])) / math.log(abs(eig[i]))
            conv = convergents(ratio, max_denominator)
            need = next((q for p, q in conv if abs(ratio - p / q) <= tol), None)
            out.append(RatioEntry((words[i], words[j]), (eig[i], eig[j]), ratio, conv, need))
    return out
