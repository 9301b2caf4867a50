"""Permutation patterns over the five wire positions.

A pattern is a permutation of positions {1..5} describing how the standard
codeword layout is mapped onto the transmitted wires.  Two patterns form a
usable secret set only if they disagree in at least three positions, which
leaves 6540 unordered pairs out of the 120 * 119 / 2 = 7140 possible ones.

All enumerations here are eager, lexicographically ordered, and cached, so
they can serve as exact distribution oracles elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

POSITIONS = (1, 2, 3, 4, 5)
MIN_SET_DISTANCE = 3


@dataclass(frozen=True, order=True)
class Pattern:
    """A permutation of the five wire positions, in one-line notation.

    ``mapping[i - 1] == p(i)`` is the physical position that standard
    position ``i`` is sent to.
    """

    mapping: tuple[int, int, int, int, int]

    def __post_init__(self) -> None:
        if tuple(sorted(self.mapping)) != POSITIONS:
            raise ValueError(f"not a permutation of 1..5: {self.mapping}")

    def __call__(self, position: int) -> int:
        return self.mapping[position - 1]

    def __str__(self) -> str:
        return "".join(str(v) for v in self.mapping)

    @classmethod
    def identity(cls) -> "Pattern":
        return cls(POSITIONS)

    @classmethod
    def from_string(cls, text: str) -> "Pattern":
        """Parse one-line notation such as ``"21345"``."""
        if len(text) != 5 or not text.isdigit():
            raise ValueError(f"pattern must be 5 digits, got {text!r}")
        return cls(tuple(int(ch) for ch in text))


@dataclass(frozen=True, order=True)
class PatternSet:
    """Unordered pair of patterns at distance >= 3, stored canonically.

    Construction from ``(a, b)`` and ``(b, a)`` yields identical values;
    ``first`` is always the lexicographically smaller member.
    """

    first: Pattern
    second: Pattern

    def __post_init__(self) -> None:
        if self.second < self.first:
            a, b = self.second, self.first
            object.__setattr__(self, "first", a)
            object.__setattr__(self, "second", b)
        if self.first == self.second:
            raise ValueError("pattern set members must be distinct")
        d = pattern_distance(self.first, self.second)
        if d < MIN_SET_DISTANCE:
            raise ValueError(
                f"patterns {self.first} and {self.second} differ in only "
                f"{d} positions (need >= {MIN_SET_DISTANCE})"
            )

    def members(self) -> tuple[Pattern, Pattern]:
        return (self.first, self.second)

    def __contains__(self, pattern: Pattern) -> bool:
        return pattern == self.first or pattern == self.second

    def __str__(self) -> str:
        return f"{self.first} {self.second}"

    @classmethod
    def from_string(cls, text: str) -> "PatternSet":
        """Parse two whitespace-separated one-line patterns."""
        parts = text.split()
        if len(parts) != 2:
            raise ValueError(f"expected two patterns, got {text!r}")
        return cls(Pattern.from_string(parts[0]), Pattern.from_string(parts[1]))


@lru_cache(maxsize=1)
def all_patterns() -> tuple[Pattern, ...]:
    """All 120 patterns in lexicographic order (identity first)."""
    return tuple(Pattern(p) for p in itertools.permutations(POSITIONS))


def pattern_distance(p: Pattern, q: Pattern) -> int:
    """Number of positions where the two patterns disagree.

    Ranges over {0, 2, 3, 4, 5}: two distinct permutations of the same
    values can never differ in exactly one slot.
    """
    return sum(1 for a, b in zip(p.mapping, q.mapping) if a != b)


def compose(p: Pattern, q: Pattern) -> Pattern:
    """Function composition ``p after q``: the result maps i to p(q(i))."""
    return Pattern(tuple(p(q(i)) for i in POSITIONS))


def invert(p: Pattern) -> Pattern:
    """The inverse permutation: ``compose(p, invert(p))`` is the identity."""
    inverse = [0] * 5
    for i in POSITIONS:
        inverse[p(i) - 1] = i
    return Pattern(tuple(inverse))


@lru_cache(maxsize=1)
def valid_pattern_sets() -> tuple[PatternSet, ...]:
    """All 6540 unordered pattern pairs at distance >= 3, in lexicographic
    order of (first, second)."""
    patterns = all_patterns()
    sets = []
    for i, p in enumerate(patterns):
        for q in patterns[i + 1:]:
            if pattern_distance(p, q) >= MIN_SET_DISTANCE:
                sets.append(PatternSet(p, q))
    return tuple(sets)


def sample_pattern_set(rng: np.random.Generator) -> PatternSet:
    """Draw a pattern set uniformly from the 6540 valid ones."""
    table = valid_pattern_sets()
    return table[int(rng.integers(0, len(table)))]


def sample_pattern(pattern_set: PatternSet, rng: np.random.Generator) -> tuple[int, Pattern]:
    """Draw one member of the set uniformly; returns (index, pattern)."""
    index = int(rng.integers(0, 2))
    return index, pattern_set.members()[index]


def sets_sharing(true_set: PatternSet, count: int) -> tuple[PatternSet, ...]:
    """All valid sets sharing exactly ``count`` patterns with ``true_set``.

    ``count = 2`` yields the set itself; 1 and 0 partition the rest.
    """
    if count not in (0, 1, 2):
        raise ValueError("count must be 0, 1, or 2")
    truth = set(true_set.members())
    return tuple(
        s for s in valid_pattern_sets()
        if len(truth.intersection(s.members())) == count
    )
