"""Sumsets, measure, thickness and the middle-alpha region classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import CapExceeded, NoGaps
from .ifs import Ifs, generation_cover
from .symbolic import DEFAULT_CAP
from .intervals import IntervalUnion, merge_sorted

MERGE_RTOL = 1e-12
PAIR_CAP = 2**28
_CHUNK_PAIRS = 2**22

CANTOR_ZONE = "cantor_zone"
REGION_R = "region_R"
INTERVAL_ZONE = "interval_zone"
TAG_CODES = {CANTOR_ZONE: 0, REGION_R: 1, INTERVAL_ZONE: 2}


def minkowski_sum(A: IntervalUnion, B: IntervalUnion, merge_rtol: float = MERGE_RTOL,
                  pair_cap: int = PAIR_CAP) -> IntervalUnion:
    """``{a + b}`` as a canonical union.

    All pairwise interval sums are formed (in chunks), sorted and merged;
    neighbours closer than ``merge_rtol`` times the hull length are joined.
    """
    if A.is_empty or B.is_empty:
        raise ValueError("minkowski_sum needs nonempty operands")
    pairs = len(A) * len(B)
    if pairs > pair_cap:
        raise CapExceeded(f"{len(A)} x {len(B)} = {pairs} interval pairs exceeds cap {pair_cap}")
    small, large = (A, B) if len(A) <= len(B) else (B, A)
    hull_len = (A.hi[-1] + B.hi[-1]) - (A.lo[0] + B.lo[0])
    tol = merge_rtol * hull_len
    rows = max(1, _CHUNK_PAIRS // len(large))
    acc_lo, acc_hi = np.empty(0), np.empty(0)
    for start in range(0, len(small), rows):
        s_lo = small.lo[start:start + rows, None]
        s_hi = small.hi[start:start + rows, None]
        lo, hi = merge_sorted((s_lo + large.lo).ravel(), (s_hi + large.hi).ravel(), tol)
        acc_lo, acc_hi = merge_sorted(np.concatenate([acc_lo, lo]), np.concatenate([acc_hi, hi]), tol)
    return IntervalUnion._trusted(acc_lo, acc_hi)


def measure(A: IntervalUnion) -> float:
    """Lebesgue measure of a finite union."""
    return A.measure


def thickness(A: IntervalUnion, rtol: float = 1e-9) -> float:
    """Newhouse thickness of the gap structure of ``A``.

    For every bounded gap, each bridge runs from the gap edge outwards to the
    nearest strictly larger gap (or the hull end); the gap's ratio is its
    shorter bridge over its length.  Gaps within ``rtol`` of each other count
    as equal, so float noise does not decide which bridge stops where.
    """
    if A.is_empty:
        raise ValueError("thickness of an empty union")
    if len(A) < 2:
        raise NoGaps("a single interval has no bounded gap; its thickness is +inf")
    gaps = A.gaps
    n = gaps.size
    left_stop = np.full(n, -1)
    right_stop = np.full(n, n)
    stack: list[int] = []
    for k in range(n):
        while stack and gaps[stack[-1]] <= gaps[k] * (1 + rtol):
            stack.pop()
        left_stop[k] = stack[-1] if stack else -1
        stack.append(k)
    stack = []
    for k in range(n - 1, -1, -1):
        while stack and gaps[stack[-1]] <= gaps[k] * (1 + rtol):
            stack.pop()
        right_stop[k] = stack[-1] if stack else n
        stack.append(k)
    idx = np.arange(n)
    # gap k sits between interval k and k + 1
    left_edge = np.where(left_stop >= 0, A.lo[np.clip(left_stop + 1, 0, None)], A.lo[0])
    right_edge = np.where(right_stop < n, A.hi[np.clip(right_stop, None, n - 1)], A.hi[-1])
    left_bridge = A.hi[idx] - left_edge
    right_bridge = right_edge - A.lo[idx + 1]
    return float(np.min(np.minimum(left_bridge, right_bridge) / gaps))


def gap_lemma_predicate(tau1: float, tau2: float) -> bool:
    """True when tau1 * tau2 > 1, which forces interlinked Cantor sets to intersect."""
    if tau1 <= 0 or tau2 <= 0:
        raise ValueError("thickness values must be positive")
    return tau1 * tau2 > 1


@dataclass(frozen=True)
class RegionVerdict:
    tag: str
    dim_sum: float
    thickness_product: float

    @property
    def code(self) -> int:
        return TAG_CODES[self.tag]


def middle_alpha_dimension(a: float) -> float:
    return math.log(2) / math.log(1 / a)


def middle_alpha_thickness(a: float) -> float:
    return a / (1 - 2 * a)


def middle_alpha_classify(a: float, b: float) -> RegionVerdict:
    """Place ``C_a + C_b`` in the Cantor zone, the interval zone or region R."""
    for name, v in (("a", a), ("b", b)):
        if not 0 < v < 0.5:
            raise ValueError(f"{name} must lie in (0, 1/2), got {v}")
    dim_sum = middle_alpha_dimension(a) + middle_alpha_dimension(b)
    tprod = middle_alpha_thickness(a) * middle_alpha_thickness(b)
    if dim_sum < 1:
        tag = CANTOR_ZONE
    elif tprod > 1:
        tag = INTERVAL_ZONE
    else:
        tag = REGION_R
    return RegionVerdict(tag, dim_sum, tprod)


def region_grid(a_values, b_values) -> np.ndarray:
    """Tag codes with shape (len(b_values), len(a_values)); row j is b_values[j]."""
    a = np.asarray(a_values, dtype=float)[None, :]
    b = np.asarray(b_values, dtype=float)[:, None]
    if np.any(a <= 0) or np.any(a >= 0.5) or np.any(b <= 0) or np.any(b >= 0.5):
        raise ValueError("middle-alpha ratios must lie in (0, 1/2)")
    dim_sum = np.log(2) / np.log(1 / a) + np.log(2) / np.log(1 / b)
    tprod = (a / (1 - 2 * a)) * (b / (1 - 2 * b))
    codes = np.full(dim_sum.shape, TAG_CODES[REGION_R], dtype=np.int64)
    codes[tprod > 1] = TAG_CODES[INTERVAL_ZONE]
    codes[dim_sum < 1] = TAG_CODES[CANTOR_ZONE]
    return codes


CoverSource = Union[Ifs, IntervalUnion, Callable[[int], IntervalUnion]]


def _cover_at(source: CoverSource, k: int) -> IntervalUnion:
    if isinstance(source, Ifs):
        return generation_cover(source, k)
    if isinstance(source, IntervalUnion):
        return source
    return source(k)


@dataclass
class SumCoverAnalysis:
    depths: list[int]
    measures: list[float]
    counts: list[int]
    verdict_hint: str
    fitted_ratio: float
    hints: list[str] = field(default_factory=list)


def decay_hint(measures, counts, window: int = 4, threshold: float = 0.95) -> tuple[str, float]:
    """Heuristic label for a measure sequence, plus the fitted per-depth ratio."""
    measures = list(measures)
    ratio = math.nan
    tail = measures[-window:]
    if len(tail) >= 2:
        if min(tail) <= 0:
            ratio = 0.0
        else:
            slope = np.polyfit(np.arange(len(tail)), np.log(tail), 1)[0]
            ratio = float(math.exp(slope))
    if counts and all(c == 1 for c in counts):
        return "interval", ratio
    if len(measures) >= window and ratio < threshold:
        return "shrinking-to-zero", ratio
    return "plateau", ratio


def _check_caps(ifs1: Ifs, set2: CoverSource, n: int, pair_cap: int):
    """Fail fast when some depth <= n would exceed the cylinder or pair caps."""
    def size(src, k):
        if isinstance(src, Ifs):
            return src.m**k
        if isinstance(src, IntervalUnion):
            return len(src)
        return 1  # callables are checked when evaluated

    for k in range(1, n + 1):
        too_many = ifs1.m**k > DEFAULT_CAP or (isinstance(set2, Ifs) and set2.m**k > DEFAULT_CAP)
        if too_many or size(ifs1, k) * size(set2, k) > pair_cap:
            raise CapExceeded(f"depth {k} exceeds the enumeration caps", suggested_depth=k - 1)


def sum_cover_analysis(ifs1: Ifs, set2: CoverSource, n: int, merge_rtol: float = MERGE_RTOL,
                       pair_cap: int = PAIR_CAP) -> SumCoverAnalysis:
    """Measure and interval count of ``cover1(k) + cover2(k)`` for k = 1..n.

    The sequence is nonincreasing and converges to the measure of the true
    sumset; the hint is a heuristic label, never a proof.
    """
    if n < 1:
        raise ValueError("depth must be >= 1")
    _check_caps(ifs1, set2, n, pair_cap)
    depths, measures, counts, hints = [], [], [], []
    for k in range(1, n + 1):
        try:
            s = minkowski_sum(generation_cover(ifs1, k), _cover_at(set2, k), merge_rtol, pair_cap)
        except CapExceeded as exc:
            raise CapExceeded(f"depth {k}: {exc}", suggested_depth=k - 1) from None
        depths.append(k)
        measures.append(s.measure)
        counts.append(len(s))
        hints.append(decay_hint(measures, counts)[0])
    hint, ratio = decay_hint(measures, counts)
    return SumCoverAnalysis(depths, measures, counts, hint, ratio, hints)
