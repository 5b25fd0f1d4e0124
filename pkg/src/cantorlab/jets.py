"""Second-order jets and the parametric branch primitives they are evaluated on.

A jet is the triple (value, first derivative, second derivative).  Branches of
an expanding map are stored as small parametric families so that every
derivative is exact and long compositions can be folded jet by jet.

Every primitive also knows how to compute ``f(x + h) - f(x)`` without
subtracting two nearly equal numbers.  Deep cylinders are far smaller than the
spacing of doubles near their location, so all length and ratio computations
downstream go through these difference formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidBranch, OutOfDomain

DOMAIN_TOL = 1e-12


class Jet2(NamedTuple):
    value: float
    d1: float
    d2: float


def compose_jets(outer: Jet2, inner: Jet2) -> Jet2:
    """Jet of ``outer ∘ inner``; ``outer`` must have been evaluated at ``inner.value``."""
    return Jet2(
        outer.value,
        outer.d1 * inner.d1,
        outer.d2 * inner.d1 ** 2 + outer.d1 * inner.d2,
    )


# -- primitives --------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    """x ↦ p + q·x"""

    p: float
    q: float

    family = "affine"

    def value(self, x):
        return self.p + self.q * x

    def d1(self, x):
        return self.q + 0.0 * x

    def d2(self, x):
        return 0.0 * x

    def diff(self, x, h):
        return self.q * h

    def signed_d1_range(self, lo, hi):
        return (self.q, self.q)

    def coeffs(self):
        return [self.p, self.q]


@dataclass(frozen=True)
class Moebius:
    """x ↦ (a·x + b) / (c·x + d), with a·d − b·c ≠ 0."""

    a: float
    b: float
    c: float
    d: float

    family = "moebius"

    def __post_init__(self):
        if self.det == 0:
            raise InvalidBranch(f"degenerate Moebius map {self}")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def pole(self):
        return None if self.c == 0 else -self.d / self.c

    def value(self, x):
        return (self.a * x + self.b) / (self.c * x + self.d)

    def d1(self, x):
        return self.det / (self.c * x + self.d) ** 2

    def d2(self, x):
        return -2.0 * self.c * self.det / (self.c * x + self.d) ** 3

    def diff(self, x, h):
        return self.det * h / ((self.c * (x + h) + self.d) * (self.c * x + self.d))

    def signed_d1_range(self, lo, hi):
        # |f'| is monotone on any interval avoiding the pole
        ends = (self.d1(lo), self.d1(hi))
        return (min(ends), max(ends))

    def coeffs(self):
        return [self.a, self.b, self.c, self.d]

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


@dataclass(frozen=True)
class PerturbedAffine:
    """x ↦ p + q·x + ε·x²·(1 − x)"""

    p: float
    q: float
    eps: float

    family = "perturbed_affine"

    def value(self, x):
        return self.p + self.q * x + self.eps * x * x * (1.0 - x)

    def d1(self, x):
        return self.q + self.eps * (2.0 * x - 3.0 * x * x)

    def d2(self, x):
        return self.eps * (2.0 - 6.0 * x)

    def diff(self, x, h):
        # P(x) = x² − x³;  P(x+h) − P(x) = h·(2x − 3x² + h(1 − 3x) − h²)
        return self.q * h + self.eps * h * (2.0 * x - 3.0 * x * x + h * (1.0 - 3.0 * x) - h * h)

    def signed_d1_range(self, lo, hi):
        pts = [lo, hi]
        if lo < 1.0 / 3.0 < hi:
            pts.append(1.0 / 3.0)  # critical point of the quadratic derivative
        vals = [self.d1(t) for t in pts]
        return (min(vals), max(vals))

    def coeffs(self):
        return [self.p, self.q, self.eps]


@dataclass(frozen=True)
class Composite:
    """Composition ``parts[0] ∘ parts[1] ∘ … ∘ parts[-1]`` (last part applied first)."""

    parts: tuple

    family = "composite"

    def value(self, x):
        for part in reversed(self.parts):
            x = part.value(x)
        return x

    def jet(self, x):
        jet = Jet2(x, 1.0, 0.0)
        for part in reversed(self.parts):
            pt = jet.value
            jet = compose_jets(Jet2(part.value(pt), part.d1(pt), part.d2(pt)), jet)
        return jet

    def d1(self, x):
        return self.jet(x).d1

    def d2(self, x):
        return self.jet(x).d2

    def diff(self, x, h):
        for part in reversed(self.parts):
            x, h = part.value(x), part.diff(x, h)
        return h

    def signed_d1_range(self, lo, hi):
        # product enclosure over the successive image intervals
        mn, mx = 1.0, 1.0
        for part in reversed(self.parts):
            r = part.signed_d1_range(lo, hi)
            cands = (mn * r[0], mn * r[1], mx * r[0], mx * r[1])
            mn, mx = min(cands), max(cands)
            a, b = part.value(lo), part.value(hi)
            lo, hi = min(a, b), max(a, b)
        return (mn, mx)

    def coeffs(self):
        return [[p.family, p.coeffs()] for p in self.parts]


FAMILIES = {
    "affine": Affine,
    "moebius": Moebius,
    "perturbed_affine": PerturbedAffine,
}


def make_primitive(family: str, coeffs):
    if family == "composite":
        return Composite(tuple(make_primitive(f, c) for f, c in coeffs))
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise InvalidBranch(f"unknown branch family {family!r}") from None
    return cls(*[float(c) for c in coeffs])


def simplify_composition(parts):
    """Collapse a composition into one primitive when the family is closed under ∘."""
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    if all(isinstance(p, Affine) for p in parts):
        p, q = 0.0, 1.0
        for part in parts:  # outermost first: x ↦ part.p + part.q·(p + q·x)
            p, q = p + q * part.p, q * part.q
        return Affine(p, q)
    if all(isinstance(p, (Affine, Moebius)) for p in parts):
        m = np.eye(2)
        for part in parts:
            pm = part.matrix() if isinstance(part, Moebius) else np.array([[part.q, part.p], [0.0, 1.0]])
            m = m @ pm
        scale = np.max(np.abs(m))
        m = m / scale
        return Moebius(*m.ravel().tolist())
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, Composite) else (p,))
    return Composite(tuple(flat))


# -- branches ----------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    """A primitive restricted to a closed domain; validated monotone and contractive."""

    primitive: object
    domain: tuple

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise InvalidBranch(f"empty domain {self.domain}")
        prim = self.primitive
        if isinstance(prim, Moebius):
            pole = prim.pole()
            if pole is not None and lo - DOMAIN_TOL <= pole <= hi + DOMAIN_TOL:
                raise InvalidBranch(f"Moebius pole {pole} inside domain {self.domain}")
        mn, mx = prim.signed_d1_range(lo, hi)
        if mn <= 0.0 <= mx:
            raise InvalidBranch(f"{prim} is not strictly monotone on {self.domain}")
        if max(abs(mn), abs(mx)) >= 1.0:
            raise InvalidBranch(f"{prim} is not a contraction on {self.domain}")

    @property
    def orientation(self) -> int:
        return 1 if self.primitive.d1(self.domain[0]) > 0 else -1

    def image(self, lo=None, hi=None):
        lo = self.domain[0] if lo is None else lo
        hi = self.domain[1] if hi is None else hi
        a, b = self.primitive.value(lo), self.primitive.value(hi)
        return (min(a, b), max(a, b))

    def contains(self, x) -> bool:
        lo, hi = self.domain
        return lo - DOMAIN_TOL <= x <= hi + DOMAIN_TOL


def eval_jet(branch: Branch, x: float) -> Jet2:
    """Value, first and second derivative of the branch at ``x``."""
    if not branch.contains(x):
        raise OutOfDomain(f"{x} not in {branch.domain}")
    prim = branch.primitive
    if isinstance(prim, Composite):
        return prim.jet(x)
    return Jet2(float(prim.value(x)), float(prim.d1(x)), float(prim.d2(x)))


def derivative_range(branch: Branch, subinterval=None):
    """Enclosure ``(min |f'|, max |f'|)`` of the branch derivative on ``subinterval``."""
    lo, hi = branch.domain if subinterval is None else subinterval
    if not (branch.contains(lo) and branch.contains(hi)) or lo > hi:
        raise OutOfDomain(f"{(lo, hi)} not inside {branch.domain}")
    mn, mx = branch.primitive.signed_d1_range(lo, hi)
    if mn > 0:
        return (mn, mx)
    if mx < 0:
        return (-mx, -mn)
    return (0.0, max(-mn, mx))
