"""Finite unions of closed intervals on the line, kept sorted and disjoint."""

from __future__ import annotations

import io

import numpy as np


def merge_sorted(lo: np.ndarray, hi: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Sort intervals and merge any whose separating gap is <= ``tol``."""
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    if lo.size == 0:
        return lo, hi
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    starts = np.ones(lo.size, dtype=bool)
    starts[1:] = lo[1:] - reach[:-1] > tol
    idx = np.flatnonzero(starts)
    return lo[idx], np.maximum.reduceat(hi, idx)


class IntervalUnion:
    """Sorted, strictly disjoint closed intervals ``[lo[k], hi[k]]``."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo=(), hi=(), merge_tol: float = 0.0):
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("lo and hi must have the same length")
        if np.any(hi < lo):
            raise ValueError("interval with right end before left end")
        lo, hi = merge_sorted(lo, hi, merge_tol)
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.lo, self.hi = lo, hi

    @classmethod
    def from_pairs(cls, pairs, merge_tol: float = 0.0) -> IntervalUnion:
        pairs = list(pairs)
        if not pairs:
            return cls()
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], merge_tol)

    @classmethod
    def _trusted(cls, lo, hi) -> IntervalUnion:
        out = cls.__new__(cls)
        lo = np.ascontiguousarray(lo, dtype=float)
        hi = np.ascontiguousarray(hi, dtype=float)
        lo.setflags(write=False)
        hi.setflags(write=False)
        out.lo, out.hi = lo, hi
        return out

    def __len__(self):
        return self.lo.size

    def __iter__(self):
        return iter(zip(self.lo.tolist(), self.hi.tolist()))

    def __repr__(self):
        if len(self) > 6:
            return f"IntervalUnion(<{len(self)} intervals>, hull={self.hull})"
        return f"IntervalUnion({list(self)})"

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def isclose(self, other: IntervalUnion, atol: float = 1e-12) -> bool:
        return (len(self) == len(other)
                and np.allclose(self.lo, other.lo, rtol=0, atol=atol)
                and np.allclose(self.hi, other.hi, rtol=0, atol=atol))

    @property
    def is_empty(self) -> bool:
        return self.lo.size == 0

    @property
    def measure(self) -> float:
        return float(np.sum(self.hi - self.lo)) if self.lo.size else 0.0

    @property
    def hull(self) -> tuple[float, float] | None:
        if self.is_empty:
            return None
        return float(self.lo[0]), float(self.hi[-1])

    @property
    def gaps(self) -> np.ndarray:
        """Lengths of the bounded complementary gaps, left to right."""
        return self.lo[1:] - self.hi[:-1]

    def contains(self, other: IntervalUnion, tol: float = 0.0) -> bool:
        """True iff every interval of ``other`` lies inside one interval of ``self``."""
        if other.is_empty:
            return True
        if self.is_empty:
            return False
        k = np.searchsorted(self.lo, other.lo + tol, side="right") - 1
        if np.any(k < 0):
            return False
        return bool(np.all(other.lo >= self.lo[k] - tol) and np.all(other.hi <= self.hi[k] + tol))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for l, r in self:
            buf.write(f"{l!r},{r!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> IntervalUnion:
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                l, r = (float(v) for v in line.split(","))
            except ValueError:
                raise ValueError(f"line {lineno}: expected 'l,r', got {line!r}") from None
            pairs.append((l, r))
        return cls.from_pairs(pairs)
