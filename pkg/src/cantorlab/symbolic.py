"""Alphabets, transition sets and admissible words of a subshift of finite type."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotMixing, ScaleTooFine, UnusedLetter

DEFAULT_BUDGET = 2_000_000
SCALE_RTOL = 1e-9


@dataclass(frozen=True)
class SubshiftSpec:
    alphabet: tuple
    transitions: frozenset
    mixing_power: int
    _index: dict = field(init=False, repr=False, compare=False)
    _succ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {a: i for i, a in enumerate(self.alphabet)}
        succ = {a: tuple(b for b in self.alphabet if (a, b) in self.transitions) for a in self.alphabet}
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_succ", succ)

    def index(self, symbol) -> int:
        return self._index[symbol]

    def successors(self, symbol) -> tuple:
        """Symbols allowed after ``symbol``, in alphabet order."""
        return self._succ[symbol]

    def matrix(self) -> np.ndarray:
        n = len(self.alphabet)
        m = np.zeros((n, n), dtype=np.int64)
        for a, b in self.transitions:
            m[self._index[a], self._index[b]] = 1
        return m

    def is_admissible(self, word) -> bool:
        if len(word) == 0 or any(a not in self._index for a in word):
            return False
        return all((a, b) in self.transitions for a, b in zip(word, word[1:]))

    def is_cyclic(self, word) -> bool:
        return self.is_admissible(word) and (word[-1], word[0]) in self.transitions


def validate_subshift(alphabet, transitions) -> SubshiftSpec:
    """Check that the shift uses every letter and is mixing; compute its mixing power."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ValueError("alphabet must be nonempty")
    if len(set(alphabet)) != len(alphabet):
        raise ValueError("alphabet has repeated symbols")
    transitions = frozenset(tuple(t) for t in transitions)
    known = set(alphabet)
    for a, b in transitions:
        if a not in known or b not in known:
            raise ValueError(f"transition {(a, b)} uses a symbol outside the alphabet")
    firsts = {a for a, _ in transitions}
    seconds = {b for _, b in transitions}
    for a in alphabet:
        if a not in firsts or a not in seconds:
            raise UnusedLetter(f"symbol {a!r} never appears on both sides of a transition")

    n = len(alphabet)
    index = {a: i for i, a in enumerate(alphabet)}
    m = np.zeros((n, n), dtype=bool)
    for a, b in transitions:
        m[index[a], index[b]] = True
    # Wielandt: a primitive n×n matrix has a positive power ≤ (n−1)² + 1
    power = m.copy()
    for p in range(1, (n - 1) ** 2 + 2):
        if power.all():
            return SubshiftSpec(alphabet, transitions, p)
        power = (power.astype(np.int64) @ m.astype(np.int64)) > 0
    raise NotMixing("transition matrix is not primitive")


def enumerate_words(spec: SubshiftSpec, length: int, starts=None) -> list:
    """All admissible words of ``length`` symbols, lexicographic in alphabet order."""
    if length < 1:
        raise ValueError("length must be >= 1")
    words = [(a,) for a in (spec.alphabet if starts is None else starts)]
    for _ in range(length - 1):
        words = [w + (b,) for w in words for b in spec.successors(w[-1])]
    return words


def words_at_scale(system, rho, c0=2.0, *, length_fn=None, starts=None, budget=DEFAULT_BUDGET) -> list:
    """Words ``a`` with ``rho/c0 <= |I(a)| <= c0·rho``.

    Depth-first in lexicographic order (a word precedes its extensions).  A branch
    of the search is cut as soon as the cylinder is shorter than ``rho/c0``,
    since extending a word only shrinks its cylinder.  ``length_fn`` replaces the
    cylinder length, e.g. by a length measured after an embedding.
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if c0 < 1:
        raise ValueError("c0 must be >= 1")
    spec = system.spec
    length_fn = length_fn or system.cylinder_length
    lo = rho / c0 * (1 - SCALE_RTOL)
    hi = c0 * rho * (1 + SCALE_RTOL)
    out = []
    visited = 0
    stack = [(a,) for a in reversed(spec.alphabet if starts is None else tuple(starts))]
    while stack:
        word = stack.pop()
        visited += 1
        if visited > budget:
            raise ScaleTooFine(f"rho={rho} needs more than {budget} enumerated words")
        size = length_fn(word)
        if size < lo:
            continue
        if size <= hi:
            out.append(word)
        stack.extend(word + (b,) for b in reversed(spec.successors(word[-1])))
    return out


def greedy_extension(spec: SubshiftSpec, symbol, length: int) -> tuple:
    """Lexicographically smallest admissible word of ``length`` symbols starting at ``symbol``."""
    word = [symbol]
    while len(word) < length:
        word.append(spec.successors(word[-1])[0])
    return tuple(word)


def greedy_tail(spec: SubshiftSpec, symbol, length: int) -> tuple:
    """Backward counterpart of ``greedy_extension``: a tail of ``length`` symbols ending at ``symbol``.

    Each new leftmost symbol is the first letter in alphabet order that may precede
    the current one.
    """
    word = [symbol]
    while len(word) < length:
        word.insert(0, next(a for a in spec.alphabet if (a, word[0]) in spec.transitions))
    return tuple(word)
