"""Dimensions, Bernoulli measures on cylinders, histograms and their convolutions."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BinMismatch, DegenerateFit, NoRoot, ResolutionMismatch,
                     ResolutionTooCoarse)
from .ifs import Ifs, cylinder_intervals
from .intervals import IntervalUnion
from .symbolic import DEFAULT_CAP, cylinder_count


@dataclass(frozen=True)
class BernoulliWeights:
    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        object.__setattr__(self, "p", p)
        if len(p) < 2:
            raise ValueError("need at least two weights")
        if min(p) < 0:
            raise ValueError(f"negative weight in {p}")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {math.fsum(p)!r}, not 1")

    @classmethod
    def uniform(cls, m: int) -> BernoulliWeights:
        return cls((1.0 / m,) * m)

    @property
    def m(self) -> int:
        return len(self.p)

    def as_array(self) -> np.ndarray:
        return np.array(self.p)


def moran_dimension(ratios, tol: float = 1e-12) -> float:
    """Root ``s`` of ``sum |c_i|**s = 1`` (bisection; closed form when homogeneous)."""
    r = np.abs(np.asarray(ratios, dtype=float))
    if r.size < 2:
        raise ValueError("need at least two ratios")
    if np.any(r <= 0) or np.any(r >= 1):
        raise ValueError(f"ratios must lie in (0, 1), got {r.tolist()}")
    total = math.fsum(r)
    if total > 1 + 1e-15:
        raise NoRoot(f"ratios sum to {total} > 1; no root in (0, 1]")
    if np.all(r == r[0]):
        return math.log(r.size) / math.log(1 / r[0])
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if math.fsum(r**mid) > 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def equilibrium_weights(ratios) -> BernoulliWeights:
    """Weights ``|c_i|**s`` of the measure of maximal dimension of a self-similar set."""
    s = moran_dimension(ratios)
    p = np.abs(np.asarray(ratios, dtype=float)) ** s
    return BernoulliWeights(tuple(p / math.fsum(p)))


def entropy(w: BernoulliWeights) -> float:
    """Shannon entropy in nats, with 0 log 0 = 0."""
    return -math.fsum(p * math.log(p) for p in w.p if p > 0)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0

    def __float__(self):
        return self.value


def lyapunov_exponent(ifs: Ifs, w: BernoulliWeights, depth: int = 64, samples: int = 512,
                      seed: int = 0) -> Estimate:
    """Lyapunov exponent (nats) of the natural measure with weights ``w``.

    Affine systems give ``-sum p_i log|c_i|`` exactly.  Otherwise a Birkhoff
    average of ``-log|f'|`` is taken along ``samples`` random words of length
    ``depth`` drawn from ``w``; the standard error is reported alongside.
    """
    if w.m != ifs.m:
        raise ValueError("weights and IFS have different alphabet sizes")
    if ifs.is_affine:
        return Estimate(-math.fsum(p * math.log(abs(c)) for p, c in zip(w.p, ifs.c) if p > 0))
    rng = np.random.default_rng(seed)
    words = rng.choice(ifs.m, size=(samples, depth), p=w.as_array())
    x = np.full(samples, 0.5)
    logs = np.zeros(samples)
    for s in range(depth - 1, -1, -1):
        sym = words[:, s]
        slope = np.empty(samples)
        for i in range(ifs.m):
            mask = sym == i
            if mask.any():
                slope[mask] = ifs.fx(i, x[mask])
        logs -= np.log(np.abs(slope))
        x = ifs.apply(sym, x)
    averages = logs / depth
    return Estimate(float(averages.mean()), float(averages.std(ddof=1) / math.sqrt(samples)))


@dataclass
class BoxDimensionFit:
    dimension: float
    intercept: float
    residuals: np.ndarray
    log_inverse_mesh: np.ndarray
    log_counts: np.ndarray


def _count_and_mesh(cover):
    if isinstance(cover, tuple):
        union, mesh = cover
    else:
        union, mesh = cover, None
    if not isinstance(union, IntervalUnion):
        union = IntervalUnion.from_pairs(union)
    lengths = union.hi - union.lo
    if mesh is None:
        mesh = float(lengths.max())
    if mesh <= 0:
        raise DegenerateFit("cover mesh must be positive; pass (union, mesh) for point sets")
    count = int(np.sum(np.maximum(1, np.ceil(lengths / mesh - 1e-9))))
    return count, float(mesh)


def box_dimension_estimate(covers, depths) -> BoxDimensionFit:
    """Slope of log(count) against log(1/mesh) over the supplied depths.

    ``covers(k)`` returns an :class:`IntervalUnion` (mesh = longest interval)
    or a ``(union, mesh)`` pair.  Each interval contributes
    ``ceil(length / mesh)`` boxes.
    """
    depths = list(depths)
    if len(depths) < 3:
        raise DegenerateFit("need at least three depths")
    pairs = [_count_and_mesh(covers(k)) for k in depths]
    counts = np.array([p[0] for p in pairs], dtype=float)
    meshes = np.array([p[1] for p in pairs])
    if np.any(np.diff(meshes) >= 0):
        raise DegenerateFit("mesh does not decrease with depth")
    xs, ys = np.log(1 / meshes), np.log(counts)
    slope, intercept = np.polyfit(xs, ys, 1)
    return BoxDimensionFit(float(slope), float(intercept), ys - (slope * xs + intercept), xs, ys)


@dataclass
class MeasureHistogram:
    """Masses ``weights[k]`` on bins ``[origin + k w, origin + (k+1) w)``."""

    bin_width: float
    origin: float
    weights: np.ndarray

    def __post_init__(self):
        self.bin_width = float(self.bin_width)
        self.origin = float(self.origin)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.bin_width <= 0:
            raise ValueError("bin width must be positive")
        if np.any(self.weights < 0):
            raise ValueError("negative bin mass")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"bin masses sum to {self.weights.sum()!r}, not 1")

    @classmethod
    def point_mass(cls, x: float, bin_width: float) -> MeasureHistogram:
        """A single bin centred on ``x``."""
        return cls(bin_width, x - bin_width / 2, np.ones(1))

    @classmethod
    def uniform(cls, lo: float, hi: float, bin_width: float) -> MeasureHistogram:
        n = int(round((hi - lo) / bin_width))
        return cls((hi - lo) / n, lo, np.full(n, 1.0 / n))

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.bin_width * np.arange(self.weights.size + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.origin + self.bin_width * (np.arange(self.weights.size) + 0.5)

    @property
    def density(self) -> np.ndarray:
        return self.weights / self.bin_width

    def l2_norm(self) -> float:
        """L2 norm of the piecewise-constant density."""
        return float(math.sqrt(np.sum(self.weights**2) / self.bin_width))

    def mass_between(self, lo, hi):
        """Mass of [lo, hi], spreading each bin's mass uniformly across the bin."""
        cdf = np.concatenate([[0.0], np.cumsum(self.weights)])
        edges = self.edges
        return np.interp(hi, edges, cdf) - np.interp(lo, edges, cdf)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, w in enumerate(self.weights.tolist()):
            buf.write(f"{k},{w!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, bin_width: float, origin: float = 0.0) -> MeasureHistogram:
        rows = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("bin_index"):
                continue
            try:
                k, w = line.split(",")
                rows[int(k)] = float(w)
            except ValueError:
                raise ValueError(f"line {lineno}: expected 'bin_index,mass', got {line!r}") from None
        weights = np.zeros(max(rows) + 1 if rows else 0)
        for k, w in rows.items():
            weights[k] = w
        return cls(bin_width, origin, weights)


def cylinder_masses(w: BernoulliWeights, n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Masses of all depth-``n`` cylinders in lexicographic word order."""
    cylinder_count(w.m, n, cap)
    mass = np.ones(1)
    for _ in range(n):
        mass = np.concatenate([p * mass for p in w.p])
    return mass


def pushforward_histogram(ifs: Ifs, w: BernoulliWeights, depth: int, bin_width: float,
                          origin: float | None = None, cap: int = DEFAULT_CAP) -> MeasureHistogram:
    """Histogram of the natural measure: each depth-``depth`` cylinder's mass lands
    in the bin of its midpoint."""
    if w.m != ifs.m:
        raise ValueError("weights and IFS have different alphabet sizes")
    lo, hi = cylinder_intervals(ifs, depth, cap)
    longest = float(np.max(hi - lo))
    if longest > bin_width * (1 + 1e-9):
        raise ResolutionMismatch(f"cylinders of length {longest:.3g} exceed bin width {bin_width:.3g}; "
                                 "increase depth or widen bins")
    mass = cylinder_masses(w, depth, cap)
    mids = 0.5 * (lo + hi)
    if origin is None:
        origin = math.floor(float(mids.min()) / bin_width) * bin_width
    idx = np.floor((mids - origin) / bin_width).astype(np.int64)
    if idx.min() < 0:
        raise ValueError("origin lies to the right of the support")
    weights = np.bincount(idx, weights=mass)
    return MeasureHistogram(bin_width, origin, weights / weights.sum())


def convolution_density(h1: MeasureHistogram, h2: MeasureHistogram) -> tuple[MeasureHistogram, float]:
    """Discrete convolution of two histograms and the L2 norm of its density.

    Bin j + k of the output is centred on the sum of the centres of bins j
    and k, so a point mass centred at 0 acts as the identity.
    """
    if not math.isclose(h1.bin_width, h2.bin_width, rel_tol=1e-12):
        raise BinMismatch(f"bin widths differ: {h1.bin_width} vs {h2.bin_width}")
    bw = h1.bin_width
    weights = np.convolve(h1.weights, h2.weights)
    total = weights.sum()
    out = MeasureHistogram(bw, h1.origin + h2.origin + bw / 2, weights / total)
    return out, out.l2_norm()


@dataclass
class FrostmanCertificate:
    d: float
    C: float
    worst_ratio: float
    worst_x: float
    worst_r: float
    n_samples: int
    radii: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= self.C

    def to_dict(self) -> dict:
        return {"d": self.d, "C": self.C, "worst_ratio": self.worst_ratio, "worst_x": self.worst_x,
                "worst_r": self.worst_r, "n_samples": self.n_samples, "passed": self.passed}


def frostman_samples(hist: MeasureHistogram, n_radii: int = 16, max_centers: int = 4096):
    """Default (x, r) grid: centres on supported bins, radii geometric from 2 bins to the hull."""
    support = np.flatnonzero(hist.weights > 0)
    centers = hist.centers[support]
    if centers.size > max_centers:
        centers = centers[np.linspace(0, centers.size - 1, max_centers).round().astype(int)]
    edges = hist.edges
    span = max(edges[support.max() + 1] - edges[support.min()], 2 * hist.bin_width)
    radii = np.geomspace(2 * hist.bin_width, span, n_radii)
    return centers, radii


def frostman_check(hist: MeasureHistogram, d: float, C: float, samples=None) -> FrostmanCertificate:
    """Largest ``mass(B_r(x)) / r**d`` over a sample grid, compared with ``C``.

    ``samples`` is ``(centers, radii)`` (all pairs used) or None for the
    default grid.  Radii below two bin widths are rejected.
    """
    centers, radii = frostman_samples(hist) if samples is None else samples
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii < 2 * hist.bin_width * (1 - 1e-12)):
        raise ResolutionTooCoarse(f"radius {radii.min():.3g} below twice the bin width {hist.bin_width:.3g}")
    worst, wx, wr = -math.inf, math.nan, math.nan
    for r in radii:
        ratios = hist.mass_between(centers - r, centers + r) / r**d
        k = int(np.argmax(ratios))
        if ratios[k] > worst:
            worst, wx, wr = float(ratios[k]), float(centers[k]), float(r)
    return FrostmanCertificate(float(d), float(C), worst, wx, wr, centers.size * radii.size,
                               radii.tolist())
