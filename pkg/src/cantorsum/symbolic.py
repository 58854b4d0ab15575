"""Finite words, cylinders and eventually periodic symbol sequences over {0, ..., m-1}."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm

import numpy as np

from .errors import CapExceeded, IdenticalSequences

DEFAULT_CAP = 2**26


@dataclass(frozen=True)
class Word:
    """A finite word over an alphabet of size ``m``."""

    symbols: tuple[int, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if self.m < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.m}")
        for s in self.symbols:
            if not 0 <= s < self.m:
                raise ValueError(f"symbol {s} outside alphabet of size {self.m}")

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, k):
        return self.symbols[k]

    def __add__(self, other: Word) -> Word:
        if other.m != self.m:
            raise ValueError("cannot concatenate words over different alphabets")
        return Word(self.symbols + other.symbols, self.m)

    def __str__(self):
        return "".join(str(s) for s in self.symbols) if self.m <= 10 else ",".join(map(str, self.symbols))


@dataclass(frozen=True)
class SymbolPath:
    """The infinite sequence ``prefix + tail + tail + ...``."""

    prefix: Word
    tail: Word

    def __post_init__(self):
        if len(self.tail) == 0:
            raise ValueError("periodic tail must be nonempty")
        if self.prefix.m != self.tail.m:
            raise ValueError("prefix and tail use different alphabets")

    @classmethod
    def from_symbols(cls, prefix, tail, m=2) -> SymbolPath:
        return cls(Word(tuple(prefix), m), Word(tuple(tail), m))

    @property
    def m(self) -> int:
        return self.prefix.m

    def __getitem__(self, k: int) -> int:
        p = len(self.prefix)
        if k < p:
            return self.prefix[k]
        return self.tail[(k - p) % len(self.tail)]

    def expand(self, n: int) -> tuple[int, ...]:
        return tuple(self[k] for k in range(n))

    def shift(self, s: int) -> SymbolPath:
        """The path with its first ``s`` symbols removed."""
        p = len(self.prefix)
        if s <= p:
            return SymbolPath(Word(self.prefix.symbols[s:], self.m), self.tail)
        r = (s - p) % len(self.tail)
        rotated = self.tail.symbols[r:] + self.tail.symbols[:r]
        return SymbolPath(Word((), self.m), Word(rotated, self.m))

    def horizon(self, other: SymbolPath) -> int:
        """Comparison length beyond which two paths can no longer first differ."""
        return max(len(self.prefix), len(other.prefix)) + lcm(len(self.tail), len(other.tail))


def wedge(a: SymbolPath, b: SymbolPath) -> int:
    """Length of the longest common prefix of two infinite sequences."""
    if a.m != b.m:
        raise ValueError("paths are over different alphabets")
    for k in range(a.horizon(b)):
        if a[k] != b[k]:
            return k
    raise IdenticalSequences("sequences are identical; their common prefix is infinite")


def cylinder_count(m: int, n: int, cap: int = DEFAULT_CAP) -> int:
    if m < 2 or n < 0:
        raise ValueError(f"need m >= 2 and n >= 0, got m={m}, n={n}")
    count = m**n
    if count > cap:
        best = 0
        while m ** (best + 1) <= cap:
            best += 1
        raise CapExceeded(f"{m}^{n} = {count} cylinders exceeds cap {cap}", suggested_depth=best)
    return count


def cylinder_enumerate(m: int, n: int, cap: int = DEFAULT_CAP) -> list[Word]:
    """All words of length ``n`` in lexicographic order."""
    cylinder_count(m, n, cap)
    return [Word(w, m) for w in itertools.product(range(m), repeat=n)]


def word_digits(m: int, n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Array of shape (m**n, n); row k holds the k-th word in lexicographic order."""
    count = cylinder_count(m, n, cap)
    idx = np.arange(count, dtype=np.int64)
    powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % m


def symbol_counts(digits: np.ndarray, m: int) -> np.ndarray:
    """Per-word occurrence counts of each symbol, shape (len(digits), m)."""
    return np.stack([(digits == i).sum(axis=1) for i in range(m)], axis=1)
