"""Contracting maps of [0, 1], parametrized families, covers and the coding map.

A family is ``f_i(x, lam) = c_i(lam) x + b_i(lam) + g_i(x, lam)`` on a parameter
interval ``J``.  Freezing ``lam`` gives an :class:`Ifs`.  Symbol paths are
turned into points by composing maps; eventually periodic paths are resolved
through the fixed point of their periodic block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterOutOfRange, SeparationViolated
from .expressions import Expression
from .intervals import IntervalUnion
from .symbolic import DEFAULT_CAP, SymbolPath, cylinder_count

SEPARATION_TOL = 1e-12
CONTAINMENT_TOL = 1e-12
MONOTONE_GRID = 1025
FD_RTOL = 1e-6


@dataclass(frozen=True)
class AffineMap:
    c: float
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "b", float(self.b))
        if not 0 < abs(self.c) < 1:
            raise ValueError(f"contraction ratio must satisfy 0 < |c| < 1, got c={self.c}")
        lo, hi = sorted((self.b, self.b + self.c))
        if lo < -CONTAINMENT_TOL or hi > 1 + CONTAINMENT_TOL:
            raise ValueError(f"map x -> {self.c}x + {self.b} does not send [0,1] into itself")

    def __call__(self, x):
        return self.c * x + self.b


class PerturbationField:
    """A small nonlinear term ``g(x, lam)`` with its partial derivatives.

    ``c2_bound`` bounds |g|, |g_x|, |g_xx| and |g_xlam| on [0,1] x lam_range.
    When omitted it is measured on a grid; when given it is spot-checked.
    """

    def __init__(self, formula, c2_bound=None, lam_range=(0.0, 0.0), params=None, field=None):
        self.g = Expression(formula, ("x", "lam"), params, field)
        self.g_x = self.g.diff("x")
        self.g_xx = self.g_x.diff("x")
        self.g_lam = self.g.diff("lam")
        self.g_xlam = self.g_x.diff("lam")
        self.lam_range = (float(lam_range[0]), float(lam_range[1]))
        measured = self.sup_norm(self.lam_range)
        if c2_bound is None:
            c2_bound = measured
        elif measured > float(c2_bound) * (1 + 1e-9) + 1e-15:
            raise ValueError(f"perturbation {self.g.source!r} has C2 size {measured:.6g} "
                             f"on the sample grid, above its stated bound {c2_bound}")
        self.c2_bound = float(c2_bound)

    def sup_norm(self, lam_range, grid=129) -> float:
        xs = np.linspace(0.0, 1.0, grid)
        lams = np.linspace(lam_range[0], lam_range[1], 17 if lam_range[1] > lam_range[0] else 1)
        X, L = np.meshgrid(xs, lams)
        return float(max(np.max(np.abs(fn(X, L))) for fn in (self.g, self.g_x, self.g_xx, self.g_xlam)))

    def __repr__(self):
        return f"PerturbationField({self.g.source!r}, c2_bound={self.c2_bound:.3g})"


class Ifs:
    """Contractions of [0, 1], each affine plus an optional perturbation frozen at ``lam``."""

    def __init__(self, maps, perturbations=None, lam=0.0):
        maps = [m if isinstance(m, AffineMap) else AffineMap(*m) for m in maps]
        if len(maps) < 2:
            raise ValueError("an IFS needs at least two maps")
        if perturbations is None:
            perturbations = [None] * len(maps)
        if len(perturbations) != len(maps):
            raise ValueError("one perturbation (or None) per map is required")
        self.maps = tuple(maps)
        self.perturbations = tuple(p if p is None or not p.g.is_zero else None for p in perturbations)
        self.lam = float(lam)
        self.c = np.array([mp.c for mp in self.maps])
        self.b = np.array([mp.b for mp in self.maps])
        if not self.is_affine:
            self._check_nearly_affine()

    @classmethod
    def middle_alpha(cls, a: float) -> Ifs:
        """Two maps of ratio ``a`` at the ends of [0, 1]."""
        return cls([AffineMap(a, 0.0), AffineMap(a, 1.0 - a)])

    @classmethod
    def from_ratios(cls, ratios, offsets) -> Ifs:
        return cls([AffineMap(c, b) for c, b in zip(ratios, offsets)])

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def is_affine(self) -> bool:
        return all(p is None for p in self.perturbations)

    @property
    def ratios(self) -> np.ndarray:
        return np.abs(self.c)

    def f(self, i, x):
        out = self.c[i] * x + self.b[i]
        g = self.perturbations[i]
        return out if g is None else out + g.g(x, self.lam)

    def fx(self, i, x):
        g = self.perturbations[i]
        if g is None:
            return self.c[i] + 0.0 * np.asarray(x)
        return self.c[i] + g.g_x(x, self.lam)

    def flam(self, i, x):
        return 0.0 * np.asarray(x)

    def coef(self, i):
        return self.c[i], self.b[i]

    def contraction_bounds(self) -> np.ndarray:
        """Upper bounds on sup |f_i'| over [0, 1]."""
        extra = np.array([0.0 if g is None else g.c2_bound for g in self.perturbations])
        return np.abs(self.c) + extra

    def images(self) -> list[tuple[float, float]]:
        out = []
        for i in range(self.m):
            y0, y1 = float(self.f(i, 0.0)), float(self.f(i, 1.0))
            out.append((min(y0, y1), max(y0, y1)))
        return out

    def apply(self, symbols, x):
        """Apply ``f_{symbols[k]}`` to ``x[k]`` elementwise."""
        symbols = np.asarray(symbols)
        x = np.broadcast_to(np.asarray(x, dtype=float), symbols.shape)
        out = np.empty(symbols.shape)
        for i in range(self.m):
            mask = symbols == i
            if mask.any():
                out[mask] = self.f(i, x[mask])
        return out

    def _check_nearly_affine(self):
        xs = np.linspace(0.0, 1.0, MONOTONE_GRID)
        h = xs[1] - xs[0]
        for i, g in enumerate(self.perturbations):
            if g is None:
                continue
            slope = self.fx(i, xs)
            margin = 10.0 * g.c2_bound * h
            if not (np.all(slope > margin) or np.all(slope < -margin)):
                raise ValueError(f"map {i} is not uniformly monotone on [0,1] at lam={self.lam}")
            if np.max(np.abs(slope)) >= 1:
                raise ValueError(f"map {i} is not a contraction at lam={self.lam}")
            ys = self.f(i, xs)
            if ys.min() < -CONTAINMENT_TOL or ys.max() > 1 + CONTAINMENT_TOL:
                raise ValueError(f"map {i} does not send [0,1] into itself at lam={self.lam}")

    def __repr__(self):
        body = ", ".join(f"{mp.c:.6g}x+{mp.b:.6g}" + ("+g" if g is not None else "")
                         for mp, g in zip(self.maps, self.perturbations))
        return f"Ifs([{body}])"


@dataclass
class SeparationReport:
    separated: bool
    images: list[tuple[float, float]]
    gaps: list[tuple[float, float]]
    offending: tuple[int, int] | None = None

    def __bool__(self):
        return self.separated


def validate_separation(ifs: Ifs, tol: float = SEPARATION_TOL) -> SeparationReport:
    """Check that first-generation images are pairwise disjoint with gaps > ``tol``."""
    images = ifs.images()
    order = sorted(range(ifs.m), key=lambda k: images[k])
    ordered = [images[k] for k in order]
    gaps = [(ordered[k][1], ordered[k + 1][0]) for k in range(ifs.m - 1)]
    offending = None
    for k, (l, r) in enumerate(gaps):
        if r - l <= tol:
            offending = (order[k], order[k + 1])
            break
    return SeparationReport(offending is None, ordered, gaps, offending)


def cylinder_intervals(ifs: Ifs, n: int, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Depth-``n`` cylinder intervals ``f_{w_0} o ... o f_{w_{n-1}}([0,1])`` in lexicographic word order."""
    cylinder_count(ifs.m, n, cap)
    lo, hi = np.zeros(1), np.ones(1)
    for _ in range(n):
        new_lo, new_hi = [], []
        for i in range(ifs.m):
            a, b = ifs.f(i, lo), ifs.f(i, hi)
            new_lo.append(np.minimum(a, b))
            new_hi.append(np.maximum(a, b))
        lo, hi = np.concatenate(new_lo), np.concatenate(new_hi)
    return lo, hi


def generation_cover(ifs: Ifs, n: int, cap: int = DEFAULT_CAP) -> IntervalUnion:
    """The depth-``n`` cover I_n as a sorted union of ``m**n`` intervals."""
    if n < 0:
        raise ValueError("depth must be >= 0")
    lo, hi = cylinder_intervals(ifs, n, cap)
    return IntervalUnion(lo, hi)


@dataclass(frozen=True)
class CodingPoint:
    value: float
    error: float


def coding_point(ifs: Ifs, path: SymbolPath, depth: int = 64) -> CodingPoint:
    """Point of the attractor coded by ``path``.

    Affine systems return the exact value (periodic fixed point pushed
    through the prefix).  Otherwise ``f_{w_0} o ... o f_{w_{depth-1}}(0)``
    is returned with the bound ``prod sup|f'|`` over the truncated word.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if path.m != ifs.m:
        raise ValueError("path alphabet does not match the IFS")
    if ifs.is_affine:
        return CodingPoint(float(path_point(ifs, path)), 0.0)
    word = path.expand(depth)
    x = 0.0
    for s in reversed(word):
        x = float(ifs.f(s, x))
    bounds = ifs.contraction_bounds()
    return CodingPoint(x, float(np.prod([bounds[s] for s in word])))


def _compose(system, word, x, dx_dlam=None, derivative=False):
    """Push ``x`` through ``f_{word[0]} o ... o f_{word[-1]}``; optionally track d/dx and d/dlam."""
    fx_acc = 1.0
    dl = dx_dlam
    for s in reversed(word):
        if derivative:
            slope = system.fx(s, x)
            dl = system.flam(s, x) + slope * (0.0 if dl is None else dl)
            fx_acc = slope * fx_acc
        x = system.f(s, x)
    return x, fx_acc, dl


def _periodic_point(system, block, derivative=False, shape=()):
    if system.is_affine:
        A = np.ones(shape)
        B = np.zeros(shape)
        for s in reversed(block):
            c, b = system.coef(s)
            A, B = c * A, c * B + b
        p = B / (1.0 - A)
    else:
        p = np.full(shape, 0.5)
        for _ in range(2000):
            q, _, _ = _compose(system, block, p)
            done = np.max(np.abs(q - p)) <= 1e-15
            p = q
            if done:
                break
    if not derivative:
        return p, None
    _, Fx, Fl = _compose(system, block, p, derivative=True)
    return p, Fl / (1.0 - Fx)


def path_point(system, path: SymbolPath, derivative: bool = False, shape=()):
    """Exact coding-map value for an eventually periodic path (and its lam-derivative).

    ``system`` is an :class:`Ifs` or a family bound to a parameter array.
    """
    shape = getattr(system, "shape", shape)
    p, dp = _periodic_point(system, path.tail.symbols, derivative, shape)
    p, _, dp = _compose(system, path.prefix.symbols, p, dp, derivative)
    return (p, dp) if derivative else p


def orbit(system, path: SymbolPath, n: int, derivative: bool = False):
    """Points ``P_s`` coded by ``sigma^s(path)`` for s = 0..n (and their lam-derivatives)."""
    tail = path.shift(n)
    if derivative:
        p, dp = path_point(system, tail, derivative=True)
    else:
        p, dp = path_point(system, tail), None
    pts, dpts = [p], [dp]
    for s in range(n - 1, -1, -1):
        sym = path[s]
        if derivative:
            dp = system.flam(sym, p) + system.fx(sym, p) * dp
        p = system.f(sym, p)
        pts.append(p)
        dpts.append(dp)
    pts.reverse()
    dpts.reverse()
    return (pts, dpts) if derivative else pts


class BoundFamily:
    """A family with its parameter frozen at a scalar or array ``lam``."""

    def __init__(self, family: CantorFamily, lam):
        self.family = family
        self.lam = np.asarray(lam, dtype=float)
        self.shape = self.lam.shape
        self._c = [e(0.0, self.lam) for e in family.c]
        self._b = [e(0.0, self.lam) for e in family.b]
        self._dc = [e(0.0, self.lam) for e in family.dc]
        self._db = [e(0.0, self.lam) for e in family.db]

    @property
    def is_affine(self):
        return self.family.is_affine

    @property
    def m(self):
        return self.family.m

    def coef(self, i):
        return self._c[i], self._b[i]

    def dcoef(self, i):
        return self._dc[i], self._db[i]

    def f(self, i, x):
        out = self._c[i] * x + self._b[i]
        g = self.family.g[i]
        return out if g is None else out + g.g(x, self.lam)

    def fx(self, i, x):
        g = self.family.g[i]
        base = self._c[i] + 0.0 * np.asarray(x)
        return base if g is None else base + g.g_x(x, self.lam)

    def flam(self, i, x):
        g = self.family.g[i]
        out = self._dc[i] * x + self._db[i]
        return out if g is None else out + g.g_lam(x, self.lam)

    def fxlam(self, i, x):
        g = self.family.g[i]
        base = self._dc[i] + 0.0 * np.asarray(x)
        return base if g is None else base + g.g_xlam(x, self.lam)

    def fxx(self, i, x):
        g = self.family.g[i]
        return 0.0 * np.asarray(x) if g is None else g.g_xx(x, self.lam)


def _checked_derivative(expr: Expression, supplied, J, name):
    if supplied is None:
        return expr.diff("lam")
    deriv = Expression(supplied, ("lam",), field=name)
    lams = np.linspace(J[0], J[1], 9)
    h = 1e-5 * max(J[1] - J[0], 1e-3)
    fd = (expr(0.0, lams + h) - expr(0.0, lams - h)) / (2 * h)
    given = deriv(0.0, lams)
    if not np.allclose(given, fd, rtol=FD_RTOL, atol=FD_RTOL * 1e-3):
        raise ValueError(f"{name}: supplied derivative {supplied!r} disagrees with finite differences")
    return deriv


class CantorFamily:
    """Maps ``f_i(x, lam) = c_i(lam) x + b_i(lam) + g_i(x, lam)`` for lam in ``J``.

    ``c``, ``b`` are formulas in ``lam``; ``g`` entries are formulas in
    ``x, lam`` or None.  Derivatives of ``c``/``b`` are derived symbolically
    unless supplied, in which case they are checked against finite differences.
    ``delta`` is the uniform decay rate claimed for |c_i|.
    """

    def __init__(self, c, b, J, g=None, delta=None, dc=None, db=None, c2_bounds=None, params=None):
        m = len(c)
        if m < 2 or len(b) != m:
            raise ValueError("need at least two maps and matching c/b lists")
        lo, hi = float(J[0]), float(J[1])
        if not lo < hi:
            raise ValueError(f"parameter interval must have lo < hi, got {J}")
        self.J = (lo, hi)
        self.c = [Expression(s, ("lam",), params, f"maps[{i}].c") for i, s in enumerate(c)]
        self.b = [Expression(s, ("lam",), params, f"maps[{i}].b") for i, s in enumerate(b)]
        dc = dc or [None] * m
        db = db or [None] * m
        self.dc = [_checked_derivative(e, d, self.J, f"maps[{i}].dc") for i, (e, d) in enumerate(zip(self.c, dc))]
        self.db = [_checked_derivative(e, d, self.J, f"maps[{i}].db") for i, (e, d) in enumerate(zip(self.b, db))]
        g = g or [None] * m
        c2_bounds = c2_bounds or [None] * m
        fields = []
        for i, (gi, bound) in enumerate(zip(g, c2_bounds)):
            if gi is None or (isinstance(gi, (int, float)) and gi == 0):
                fields.append(None)
            elif isinstance(gi, PerturbationField):
                fields.append(gi)
            else:
                pf = PerturbationField(gi, bound, self.J, params, f"maps[{i}].g")
                fields.append(None if pf.g.is_zero else pf)
        self.g = fields
        self.delta = None if delta is None else float(delta)

    @property
    def m(self) -> int:
        return len(self.c)

    @property
    def is_affine(self) -> bool:
        return all(gi is None for gi in self.g)

    @property
    def c2_norm(self) -> float:
        return max((gi.c2_bound for gi in self.g if gi is not None), default=0.0)

    def contains(self, lam, tol=1e-12) -> bool:
        scale = max(1.0, abs(self.J[0]), abs(self.J[1]))
        return self.J[0] - tol * scale <= lam <= self.J[1] + tol * scale

    def grid(self, n: int, window=None) -> np.ndarray:
        lo, hi = window if window is not None else self.J
        return np.linspace(lo, hi, n)

    def coefficients(self, lam):
        c = np.array([e(0.0, lam) for e in self.c])
        b = np.array([e(0.0, lam) for e in self.b])
        return c, b

    def bind(self, lam) -> BoundFamily:
        return BoundFamily(self, lam)

    def at(self, lam) -> Ifs:
        return family_at(self, lam)

    def validate(self, grid: int = 33) -> list[str]:
        """Spot-check the family invariants; returns a list of problems (empty when fine)."""
        problems = []
        if not monotonicity_check(self, grid):
            problems.append("|c_i| is not decreasing at the claimed rate delta")
        for lam in self.grid(grid):
            try:
                family_at(self, lam)
            except (SeparationViolated, ValueError) as exc:
                problems.append(f"lam={lam:.6g}: {exc}")
                break
        return problems


def family_at(family: CantorFamily, lam: float) -> Ifs:
    """Instantiate the family at ``lam``; raises if lam is outside J or separation fails."""
    lam = float(lam)
    if not family.contains(lam):
        raise ParameterOutOfRange(f"lam={lam} outside J={family.J}")
    c, b = family.coefficients(lam)
    maps = [AffineMap(ci, bi) for ci, bi in zip(c, b)]
    ifs = Ifs(maps, family.g, lam)
    report = validate_separation(ifs)
    if not report:
        raise SeparationViolated(f"maps {report.offending} overlap or touch at lam={lam}",
                                 lam=lam, pair=report.offending)
    return ifs


def monotonicity_check(family: CantorFamily, grid: int = 65, slack: float = 1e-9) -> bool:
    """Finite-difference slopes of |c_i| over a lam-grid are all <= -delta + slack.

    With no claimed ``delta`` the slopes only have to be strictly negative.
    """
    if grid < 2:
        raise ValueError("grid must have at least two points")
    lams = family.grid(grid)
    step = lams[1] - lams[0]
    for e in family.c:
        slopes = np.diff(np.abs(e(0.0, lams))) / step
        if family.delta is None:
            if np.any(slopes >= -slack):
                return False
        elif np.any(slopes > -family.delta + slack):
            return False
    return True
