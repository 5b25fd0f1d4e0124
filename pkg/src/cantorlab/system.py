"""Regular Cantor sets: a subshift bound to base intervals and contracting inverse branches.

Conventions.  ``base_intervals[a]`` is the closed interval I(a).  The branch of
transition (a0, a1) maps I(a1) into I(a0); the cylinder of a word
``w = (w0, …, wn)`` is ``I(w) = f_{w0 w1} ∘ … ∘ f_{w(n−1) wn} (I(wn))``.
A word of n + 1 symbols therefore carries n branch applications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded, InvalidSystem, NotCyclicallyAdmissible, ScaleTooFine
from .jets import (
    Affine,
    Branch,
    Jet2,
    Moebius,
    PerturbedAffine,
    compose_jets,
    derivative_range,
    simplify_composition,
)
from .symbolic import DEFAULT_BUDGET, SCALE_RTOL, SubshiftSpec, enumerate_words, validate_subshift

CONTAINMENT_TOL = 1e-12
FIXED_POINT_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class CantorSystem:
    spec: SubshiftSpec
    base_intervals: dict
    branches: dict
    name: str = ""

    def __post_init__(self):
        spec = self.spec
        for a in spec.alphabet:
            lo, hi = self.base_intervals[a]
            if not lo < hi:
                raise InvalidSystem(f"base interval of {a!r} is empty")
        for t in spec.transitions:
            if t not in self.branches:
                raise InvalidSystem(f"no branch for transition {t}")
        for a0 in spec.alphabet:
            lo0, hi0 = self.base_intervals[a0]
            images = []
            for a1 in spec.successors(a0):
                br = self.branches[(a0, a1)]
                if tuple(br.domain) != tuple(self.base_intervals[a1]):
                    raise InvalidSystem(f"branch {(a0, a1)} domain differs from I({a1!r})")
                ilo, ihi = br.image()
                if ilo < lo0 - CONTAINMENT_TOL or ihi > hi0 + CONTAINMENT_TOL:
                    raise InvalidSystem(f"image of branch {(a0, a1)} leaves I({a0!r})")
                images.append((ilo, ihi, a1))
            images.sort()
            for (_, h1, b1), (l2, _, b2) in zip(images, images[1:]):
                if h1 >= l2:
                    raise InvalidSystem(f"cylinders ({a0!r},{b1!r}) and ({a0!r},{b2!r}) overlap")

    # -- structure ----------------------------------------------------------

    @cached_property
    def is_affine(self) -> bool:
        return all(isinstance(b.primitive, Affine) for b in self.branches.values())

    @cached_property
    def is_moebius(self) -> bool:
        return all(isinstance(b.primitive, (Affine, Moebius)) for b in self.branches.values())

    def base_length(self, symbol) -> float:
        lo, hi = self.base_intervals[symbol]
        return hi - lo

    def chain(self, word) -> list:
        """Branches of ``f_word`` in application order (innermost first)."""
        return [self.branches[(word[k], word[k + 1])] for k in range(len(word) - 2, -1, -1)]

    def check_word(self, word):
        if not self.spec.is_admissible(word):
            raise ValueError(f"word {word} is not admissible")

    # -- cylinders ----------------------------------------------------------

    def push(self, word, x, h):
        """Return ``(f_word(x), f_word(x + h) − f_word(x))`` using stable differences."""
        for br in self.chain(word):
            prim = br.primitive
            x, h = prim.value(x), prim.diff(x, h)
        return x, h

    def cylinder_interval(self, word) -> tuple:
        lo, hi = self.base_intervals[word[-1]]
        p, h = self.push(word, lo, hi - lo)
        q = p + h
        return (min(p, q), max(p, q))

    def cylinder_length(self, word) -> float:
        lo, hi = self.base_intervals[word[-1]]
        return abs(self.push(word, lo, hi - lo)[1])

    def orientation(self, word) -> int:
        sign = 1
        for br in self.chain(word):
            sign *= br.orientation
        return sign

    def word_jet(self, word, x) -> Jet2:
        """Jet of ``f_word`` at ``x ∈ I(word[-1])`` (arrays allowed)."""
        jet = Jet2(x, 1.0, 0.0)
        for br in self.chain(word):
            prim, pt = br.primitive, jet.value
            jet = compose_jets(Jet2(prim.value(pt), prim.d1(pt), prim.d2(pt)), jet)
        return jet

    @cached_property
    def expansion_constant(self) -> float:
        """λ₁ = min over transitions of 1 / max |f'|, so that Λ ≥ λ₁ⁿ on n-step cylinders."""
        return min(1.0 / derivative_range(b)[1] for b in self.branches.values())


def make_system(alphabet, transitions, base_intervals, primitives, name="") -> CantorSystem:
    """Build and validate a system from per-transition primitives."""
    spec = validate_subshift(alphabet, transitions)
    base = {a: (float(base_intervals[a][0]), float(base_intervals[a][1])) for a in spec.alphabet}
    branches = {t: Branch(primitives[t], base[t[1]]) for t in sorted(spec.transitions, key=lambda t: (spec.index(t[0]), spec.index(t[1])))}
    return CantorSystem(spec, base, branches, name)


# -- cylinder operations ------------------------------------------------------


def cylinder_interval(system: CantorSystem, word) -> tuple:
    system.check_word(word)
    return system.cylinder_interval(tuple(word))


def address_prefix_to_interval(system: CantorSystem, prefix) -> tuple:
    """Cylinder containing h(a) for every a ∈ Σ⁺ starting with ``prefix``."""
    return cylinder_interval(system, prefix)


def derivative_bounds_on_cylinder(system: CantorSystem, word) -> tuple:
    """Enclosure ``(λ_inf, Λ_sup)`` of |(gⁿ)'| over I(word), n = len(word) − 1."""
    word = tuple(word)
    system.check_word(word)
    return _derivative_bounds(system, word)


def _derivative_bounds(system, word):
    if len(word) == 1:
        return (1.0, 1.0)
    lo, hi = system.base_intervals[word[-1]]
    chain = system.chain(word)
    if system.is_moebius:
        # a Möbius composite has monotone |f'| away from its pole: endpoints are exact
        f = simplify_composition([br.primitive for br in reversed(chain)])
        ends = (abs(f.d1(lo)), abs(f.d1(hi)))
        return (1.0 / max(ends), 1.0 / min(ends))
    mn, mx = 1.0, 1.0
    for br in chain:
        a, b = derivative_range(br, (lo, hi))
        mn, mx = mn * a, mx * b
        lo, hi = br.image(lo, hi)
    return (1.0 / mx, 1.0 / mn)


def periodic_point(system: CantorSystem, word) -> tuple:
    """Fixed point of the cyclic composition of ``word`` and its signed eigenvalue."""
    word = tuple(word)
    if not system.spec.is_cyclic(word):
        raise NotCyclicallyAdmissible(f"{word} cannot be repeated")
    loop = word + (word[0],)
    lo, hi = system.base_intervals[word[0]]
    x = 0.5 * (lo + hi)
    for _ in range(10_000):
        nx = system.word_jet(loop, x).value
        done = abs(nx - x) < FIXED_POINT_TOL
        x = nx
        if done:
            break
    for _ in range(2):  # Newton polish on f(x) − x
        jet = system.word_jet(loop, x)
        if jet.d1 != 1.0:
            x = x - (jet.value - x) / (jet.d1 - 1.0)
    jet = system.word_jet(loop, x)
    return float(x), 1.0 / float(jet.d1)


def bounded_distortion_estimate(system: CantorSystem, depth: int, budget=DEFAULT_BUDGET) -> float:
    """Minimum of λ_inf / Λ_sup over all words with ``depth`` branch applications.

    An empirical stand-in for the distortion constant; it is only certified at the
    audited depth.
    """
    words = _words_checked(system, depth + 1, budget)
    return min(lo / hi for lo, hi in (_derivative_bounds(system, w) for w in words))


def cover_words(system: CantorSystem, delta: float, budget=DEFAULT_BUDGET, length_fn=None) -> list:
    """Stopping-time cover: words with |I(w)| ≤ δ whose parent cylinder is longer than δ."""
    length_fn = length_fn or system.cylinder_length
    spec = system.spec
    cut = delta * (1 + SCALE_RTOL)
    out = []
    stack = [(a,) for a in reversed(spec.alphabet)]
    visited = 0
    while stack:
        word = stack.pop()
        visited += 1
        if visited > budget:
            raise ScaleTooFine(f"delta={delta} needs more than {budget} words")
        if length_fn(word) <= cut:
            out.append(word)
        else:
            stack.extend(word + (b,) for b in reversed(spec.successors(word[-1])))
    return out


def _words_checked(system, length, budget):
    count = _count_words(system.spec, length)
    if count > budget:
        raise BudgetExceeded(f"{count} words of length {length} exceed budget {budget}")
    return enumerate_words(system.spec, length)


def _count_words(spec, length):
    m = spec.matrix().astype(float)
    v = np.ones(len(spec.alphabet))
    for _ in range(length - 1):
        v = m @ v
    return int(v.sum())


# -- generators ---------------------------------------------------------------


def middle_alpha(alpha: float, normalized: bool = False) -> CantorSystem:
    """Middle-α Cantor set: remove the open middle fraction α of [0, 1], recursively.

    By default the set is realized on the line with I(0) = [0, r], I(1) = [1 − r, 1],
    r = (1 − α)/2.  With ``normalized=True`` both base intervals are [0, 1]
    (one copy per symbol) and the branch of (a0, a1) places the piece according to a1.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    r = (1.0 - alpha) / 2.0
    return two_ratio(r, r, normalized=normalized, name=f"middle_alpha({alpha:.12g})")


def two_ratio(r1: float, r2: float, normalized: bool = False, name=None) -> CantorSystem:
    """Affine two-piece Cantor set with ratios r1 (left piece) and r2 (right piece)."""
    if not (r1 > 0 and r2 > 0 and r1 + r2 < 1):
        raise ValueError("need r1, r2 > 0 and r1 + r2 < 1")
    ratio = {0: r1, 1: r2}
    offset = {0: 0.0, 1: 1.0 - r2}
    trans = [(a, b) for a in (0, 1) for b in (0, 1)]
    if normalized:
        base = {0: (0.0, 1.0), 1: (0.0, 1.0)}
        prims = {(a, b): Affine(offset[b], ratio[b]) for a, b in trans}
    else:
        base = {0: (0.0, r1), 1: (1.0 - r2, 1.0)}
        prims = {(a, b): Affine(offset[a], ratio[a]) for a, b in trans}
    return make_system((0, 1), trans, base, prims, name or f"two_ratio({r1:.12g},{r2:.12g})")


def gauss_digits(digits) -> CantorSystem:
    """Continued-fraction Cantor set C(D) = {[0; a1, a2, …] : ai ∈ D} with branches x ↦ 1/(a + x).

    Base intervals are the convex hulls of each digit's cylinder set, on which every
    branch is a strict contraction.
    """
    digits = tuple(sorted(int(d) for d in digits))
    if len(digits) < 2 or digits[0] < 1:
        raise ValueError("need at least two positive digits")
    lo_d, hi_d = digits[0], digits[-1]
    m, big = 0.0, 1.0
    for _ in range(200):  # hull endpoints: m = [0; hi, lo, hi, …], M = [0; lo, hi, lo, …]
        m, big = 1.0 / (hi_d + big), 1.0 / (lo_d + m)
    base = {a: (1.0 / (a + big), 1.0 / (a + m)) for a in digits}
    trans = [(a, b) for a in digits for b in digits]
    prims = {(a, b): Moebius(0.0, 1.0, 1.0, float(a)) for a, b in trans}
    name = "gauss_digits(" + ",".join(map(str, digits)) + ")"
    return make_system(digits, trans, base, prims, name)


def perturbed(base: CantorSystem, eps: float) -> CantorSystem:
    """Replace every affine branch p + q·x by p + q·x + ε·x²(1 − x)."""
    prims = {}
    for t, br in base.branches.items():
        prim = br.primitive
        if not isinstance(prim, Affine):
            raise ValueError("perturbed() needs an affine base system")
        prims[t] = PerturbedAffine(prim.p, prim.q, float(eps))
    name = f"perturbed({base.name},{eps:.12g})"
    return make_system(base.spec.alphabet, base.spec.transitions, base.base_intervals, prims, name)


def ratio_for_dimension(d: float, pieces: int = 2) -> float:
    """Contraction ratio r with ``pieces · r^d = 1``."""
    return math.exp(-math.log(pieces) / d)
