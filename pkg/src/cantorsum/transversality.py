"""Finite-depth checks of the absolute-continuity hypotheses for a parametrized family.

The quantities checked are, for pairs of symbol paths with common prefix of
length n = |w ^ t| and phi(lam) = Pi_lam(w) - Pi_lam(t):

* the exponent inequalities tying d_eta to (alpha, beta, gamma),
* max |phi| <= C1 m^(-alpha n),
* Leb{lam : |v + phi(lam)| <= r} <= C2 m^(beta n) r,
* mu([u]) <= C3 m^(-gamma |u|) on cylinders meeting the retained set,

together with the machinery behind them: multipliers along orbits, Birkhoff
windows, cylinder-mass decay, and the split of dphi/dlam into three sums.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import GridTooCoarse, InfeasibleTriple
from .ifs import CantorFamily, coding_point, family_at, monotonicity_check, orbit, path_point
from .measures import (BernoulliWeights, FrostmanCertificate, MeasureHistogram, cylinder_masses,
                       entropy, equilibrium_weights, frostman_check, lyapunov_exponent)
from .symbolic import SymbolPath, Word, symbol_counts, wedge, word_digits

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ExponentTriple:
    alpha: float
    beta: float
    gamma: float
    m: int
    d_eta: float
    epsilon: float = 0.1
    k0: int = 1

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) <= 0:
            raise ValueError("alpha, beta, gamma must be positive")
        if not self.alpha < self.beta:
            raise ValueError(f"need alpha < beta, got {self.alpha} >= {self.beta}")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")

    @property
    def margins(self) -> tuple[float, float]:
        """(d + gamma/beta - 1, d - (beta - gamma)/alpha); both must be positive."""
        return (self.d_eta + self.gamma / self.beta - 1,
                self.d_eta - (self.beta - self.gamma) / self.alpha)

    @property
    def blackbox0(self) -> bool:
        return min(self.margins) > 0


# --- orbits and multipliers -------------------------------------------------

def multipliers(family: CantorFamily, lam, path: SymbolPath, n: int) -> np.ndarray:
    """``l^(s) = f'_{w_{s-1}}(P_s)`` for s = 1..n along the orbit of Pi_lam(path)."""
    bound = family.bind(lam)
    pts = orbit(bound, path, n)
    return np.array([bound.fx(path[s - 1], pts[s]) for s in range(1, n + 1)])


def birkhoff_averages(family: CantorFamily, lams, n: int) -> np.ndarray:
    """``-(1/n) sum log|l^(s)|`` for every depth-n cylinder (rows, lexicographic) and lam (columns).

    Affine families depend only on the word.  Nearly affine families use the
    cylinder point coded by the word followed by the constant tail 0.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    digits = word_digits(family.m, n)
    bound = family.bind(lams)
    if family.is_affine:
        logs = np.stack([-np.log(np.abs(bound.coef(i)[0] + 0.0 * lams)) for i in range(family.m)])
        return symbol_counts(digits, family.m) @ logs / n
    tail = SymbolPath(Word((), family.m), Word((0,), family.m))
    x = np.broadcast_to(path_point(bound, tail), (digits.shape[0], lams.size)).copy()
    total = np.zeros_like(x)
    for s in range(n - 1, -1, -1):
        sym = digits[:, s]
        for i in range(family.m):
            rows = sym == i
            if rows.any():
                xi = x[rows]
                total[rows] -= np.log(np.abs(bound.fx(i, xi)))
                x[rows] = bound.f(i, xi)
    return total / n


def birkhoff_window_check(family: CantorFamily, lams, n: int, alpha: float, beta: float) -> np.ndarray:
    """Mask of depth-n cylinders whose Birkhoff average stays in (alpha log m, beta log m) on every lam."""
    avg = birkhoff_averages(family, lams, n)
    lm = math.log(family.m)
    return np.all((avg > alpha * lm) & (avg < beta * lm), axis=1)


def smb_check(w: BernoulliWeights, n: int, gamma: float, C3: float = 1.0) -> np.ndarray:
    """Mask of depth-n cylinders with ``mu([u]) <= C3 m^(-gamma n)``."""
    mass = cylinder_masses(w, n)
    return mass <= C3 * w.m ** (-gamma * n) * (1 + 1e-12)


@dataclass
class OmegaEpsilonSet:
    depth: int
    m: int
    mask: np.ndarray
    mass: float
    epsilon: float
    birkhoff_mass: float = math.nan
    smb_mass: float = math.nan

    @property
    def passed(self) -> bool:
        return self.mass > 1 - self.epsilon

    @property
    def retained_words(self) -> list[Word]:
        digits = word_digits(self.m, self.depth)[self.mask]
        return [Word(tuple(row), self.m) for row in digits.tolist()]

    def contains(self, path: SymbolPath) -> bool:
        idx = 0
        for k in range(self.depth):
            idx = idx * self.m + path[k]
        return bool(self.mask[idx])


def select_omega_epsilon(family: CantorFamily, w: BernoulliWeights, lams, n: int,
                         triple: ExponentTriple, C3: float = 1.0) -> OmegaEpsilonSet:
    """Depth-n cylinders passing both the Birkhoff window and the cylinder-mass bound."""
    mass = cylinder_masses(w, n)
    b = birkhoff_window_check(family, lams, n, triple.alpha, triple.beta)
    s = smb_check(w, n, triple.gamma, C3)
    keep = b & s
    return OmegaEpsilonSet(n, family.m, keep, float(mass[keep].sum()), triple.epsilon,
                           float(mass[b].sum()), float(mass[s].sum()))


# --- pair sampling ----------------------------------------------------------

def sample_pairs(w: BernoulliWeights, wedge_depth: int, count: int, rng: np.random.Generator,
                 omega: OmegaEpsilonSet | None = None, segment: int = 8, max_block: int = 3):
    """Pairs with common prefix of length exactly ``wedge_depth``, drawn from ``w``.

    Each path is: shared prefix, its own distinct symbol, a random segment and
    a random periodic block.  With ``omega`` given, both paths must lie in it.
    """
    m, p = w.m, w.as_array()
    out = []
    for _ in range(50 * count):
        if len(out) == count:
            break
        common = rng.choice(m, size=wedge_depth, p=p).tolist()
        a = int(rng.choice(m, p=p))
        rest = np.delete(p, a)
        rest = rest / rest.sum() if rest.sum() > 0 else np.full(m - 1, 1.0 / (m - 1))
        b = int(np.delete(np.arange(m), a)[rng.choice(m - 1, p=rest)])
        paths = []
        for first in (a, b):
            seg = rng.choice(m, size=segment, p=p).tolist()
            block = rng.choice(m, size=int(rng.integers(1, max_block + 1)), p=p).tolist()
            paths.append(SymbolPath(Word(tuple(common + [first] + seg), m), Word(tuple(block), m)))
        if omega is not None and not all(omega.contains(q) for q in paths):
            continue
        out.append(tuple(paths))
    return out


# --- phi and its derivative -------------------------------------------------

@dataclass(frozen=True)
class PhiValue:
    value: float
    error: float


def _phi_exact(bound, omega: SymbolPath, tau: SymbolPath, n: int):
    P = orbit(bound, omega, n)
    Q = orbit(bound, tau, n)
    d = P[n] - Q[n]
    family = bound.family
    for s in range(n, 0, -1):
        sym = omega[s - 1]
        c = bound.coef(sym)[0]
        g = family.g[sym]
        d = c * d if g is None else c * d + (g.g(P[s], bound.lam) - g.g(Q[s], bound.lam))
    return d, P, Q


def phi(family: CantorFamily, omega: SymbolPath, tau: SymbolPath, lam, depth: int | None = None) -> PhiValue:
    """``Pi_lam(omega) - Pi_lam(tau)`` with an error bound.

    With ``depth=None`` both points are resolved exactly and the difference is
    accumulated along the shared prefix, so no cancellation occurs; the error
    is a rounding estimate.  With an integer ``depth`` the truncated coding
    points are subtracted and their truncation bounds added.
    """
    n = wedge(omega, tau)
    if depth is not None:
        ifs = family_at(family, lam)
        a, b = coding_point(ifs, omega, depth), coding_point(ifs, tau, depth)
        return PhiValue(a.value - b.value, a.error + b.error)
    value, P, Q = _phi_exact(family.bind(lam), omega, tau, n)
    scale = float(np.max(np.abs(P[n] - Q[n])))
    err = 8 * EPS * (n + 1) * max(abs(float(np.max(np.abs(value)))), scale * 1e-300)
    if not family.is_affine:
        err += 1e-15
    return PhiValue(value if np.ndim(value) else float(value), float(err))


@dataclass
class DerivativeDecomposition:
    total: np.ndarray | float
    S1: np.ndarray | float
    S2: np.ndarray | float
    S3: np.ndarray | float
    n: int
    product: np.ndarray | float
    s1_terms: list = field(default_factory=list)
    gap: np.ndarray | float = 0.0


def dphi_dlambda(family: CantorFamily, omega: SymbolPath, tau: SymbolPath, lam) -> DerivativeDecomposition:
    """``d phi / d lam`` and its split into S1 + S2 + S3.

    ``total`` comes from differentiating each coding point along its own path;
    the three sums are assembled separately from the partial derivatives of
    the shared maps ``k^(s) = f_{w_{s-1}}`` at ``P_s`` and ``Q_s``:

    * S1: prefix products at P times the difference of d k/d lam at P_i and Q_i,
    * S2: d k/d lam at Q_i times the difference of the prefix products,
    * S3: full products times the derivatives of the tail points P_n, Q_n.

    Periodic tails are resolved exactly, so no truncation depth is involved.
    """
    n = wedge(omega, tau)
    bound = family.bind(lam)
    P, dP = orbit(bound, omega, n, derivative=True)
    Q, dQ = orbit(bound, tau, n, derivative=True)
    total = dP[0] - dQ[0]
    prod_p, prod_q = 1.0, 1.0
    S1 = 0.0
    S2 = 0.0
    terms = []
    for i in range(1, n + 1):
        sym = omega[i - 1]
        lp, lq = bound.flam(sym, P[i]), bound.flam(sym, Q[i])
        term = prod_p * (lp - lq)
        terms.append(term)
        S1 = S1 + term
        S2 = S2 + lq * (prod_p - prod_q)
        prod_p = prod_p * bound.fx(sym, P[i])
        prod_q = prod_q * bound.fx(sym, Q[i])
    S3 = prod_p * dP[n] - prod_q * dQ[n]
    return DerivativeDecomposition(total, S1, S2, S3, n, prod_p, terms, P[n] - Q[n])


# --- transversality ---------------------------------------------------------

@dataclass
class TransversalityBound:
    delta_star: float
    per_depth: dict
    passed: bool
    stable: bool
    delta_min: float
    worst: dict = field(default_factory=dict)


def normalized_derivative(family: CantorFamily, omega: SymbolPath, tau: SymbolPath, lams) -> np.ndarray:
    """``|dphi/dlam| / (n |prod l^(s)|)`` over ``lams``."""
    dec = dphi_dlambda(family, omega, tau, lams)
    return np.abs(dec.total) / (max(dec.n, 1) * np.abs(dec.product))


def transversality_lower_bound(family: CantorFamily, lams, n_range, pairs_per_depth: int = 64,
                               w: BernoulliWeights | None = None, seed: int = 0,
                               omega: OmegaEpsilonSet | None = None, delta_min: float = 1e-4,
                               pairs_by_depth: dict | None = None) -> TransversalityBound:
    """Minimum of the normalized derivative over sampled pairs, per wedge depth.

    Passes when the overall minimum exceeds ``delta_min`` and the per-depth
    minima over the upper half of ``n_range`` are at least half those of the
    lower half (no decay with n).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    w = w or BernoulliWeights.uniform(family.m)
    rng = np.random.default_rng(seed)
    lo_n, hi_n = n_range
    per_depth, worst = {}, {}
    for n in range(lo_n, hi_n + 1):
        pairs = (pairs_by_depth or {}).get(n) or sample_pairs(w, n, pairs_per_depth, rng, omega)
        best = math.inf
        for om, ta in pairs:
            vals = normalized_derivative(family, om, ta, lams)
            k = int(np.argmin(vals))
            if vals[k] < best:
                best = float(vals[k])
                if best < worst.get("value", math.inf):
                    worst = {"value": best, "n": n, "lam": float(lams[k]),
                             "omega": _path_str(om), "tau": _path_str(ta)}
        per_depth[n] = best
    values = [per_depth[n] for n in sorted(per_depth)]
    delta_star = min(values) if values else math.nan
    half = max(1, len(values) // 2)
    stable = min(values[-half:]) >= 0.5 * min(values[:half]) if values else False
    passed = bool(delta_star > delta_min and stable)
    return TransversalityBound(delta_star, per_depth, passed, bool(stable), delta_min, worst)


def perturbation_threshold_sweep(make_family, amplitudes, lams, n_range, delta_min: float = 1e-4, **kw):
    """Run the transversality bound for families ``make_family(amplitude)``.

    Returns ``(rows, threshold)`` where ``threshold`` is the first amplitude
    whose bound fails (None if all pass).
    """
    rows, threshold = [], None
    for amp in amplitudes:
        try:
            res = transversality_lower_bound(make_family(amp), lams, n_range, delta_min=delta_min, **kw)
            rows.append((amp, res.delta_star, res.passed))
            ok = res.passed
        except ValueError:  # family stops being a valid contraction system
            rows.append((amp, math.nan, False))
            ok = False
        if not ok and threshold is None:
            threshold = amp
    return rows, threshold


@dataclass
class DistortionResult:
    constant: float
    worst_word: tuple
    n_words: int


def distortion_check(family: CantorFamily, lam: float, words, x: float = 0.0, y: float = 1.0) -> DistortionResult:
    """``max(ratio / |prod l|, |prod l| / ratio)`` over words, where ratio = |p - q| / |x - y|."""
    if x == y:
        raise ValueError("x and y must differ")
    ifs = family_at(family, lam)
    worst, worst_word, count = 1.0, (), 0
    for word in words:
        word = tuple(word)
        p, q, prod = float(x), float(y), 1.0
        for s in reversed(word):
            prod *= float(ifs.fx(s, p))
            p, q = float(ifs.f(s, p)), float(ifs.f(s, q))
        ratio = abs(p - q) / abs(x - y)
        const = max(ratio / abs(prod), abs(prod) / ratio)
        count += 1
        if const > worst:
            worst, worst_word = const, word
    return DistortionResult(worst, worst_word, count)


# --- the four conditions ----------------------------------------------------

@dataclass
class ConditionResult:
    name: str
    passed: bool
    minimal_constant: float
    configured_constant: float
    per_depth: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


def _growth(per_depth: dict) -> float:
    ks = sorted(k for k, v in per_depth.items() if v > 0 and math.isfinite(v))
    if len(ks) < 2:
        return math.nan
    return float(math.exp(np.polyfit(ks, np.log([per_depth[k] for k in ks]), 1)[0]))


def blackbox1_check(family: CantorFamily, pairs, lams, C1: float, alpha: float,
                    growth_tol: float = 0.01) -> ConditionResult:
    """``max_lam |phi| <= C1 m^(-alpha n)`` on every pair.

    The minimal feasible C1 is reported per wedge depth; a per-depth growth
    factor above ``1 + growth_tol`` means alpha is too large and fails.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    bound = family.bind(lams)
    per_depth = {}
    for om, ta in pairs:
        n = wedge(om, ta)
        val, _, _ = _phi_exact(bound, om, ta, n)
        need = float(np.max(np.abs(val))) * family.m ** (alpha * n)
        per_depth[n] = max(per_depth.get(n, 0.0), need)
    minimal = max(per_depth.values(), default=0.0)
    growth = _growth(per_depth)
    grows = len(per_depth) >= 3 and growth > 1 + growth_tol
    return ConditionResult("blackbox1", bool(minimal <= C1 and not grows), minimal, C1,
                           dict(sorted(per_depth.items())), {"growth_per_depth": growth, "alpha": alpha})


def blackbox2_check(family: CantorFamily, pairs, lams, r_grid, C2: float, beta: float, k0: int,
                    n_v: int = 33) -> ConditionResult:
    """``sup_v Leb{lam : |v + phi(lam)| <= r} <= C2 m^(beta n) r`` on pairs with n >= k0.

    The measure is counted on the lam-grid for each r in ``r_grid`` over
    ``n_v`` values of v spanning -phi plus ``-phi(lam_mid)``.  Grid counting
    cannot see radii below ten grid steps, so the calculus bound
    ``Leb <= 2 r / min|phi'|``, valid for every r, is required as well.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    width = float(lams[-1] - lams[0])
    step = width / (lams.size - 1)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(step > r_grid / 10 * (1 + 1e-9)):
        raise GridTooCoarse(f"lam step {step:.3g} exceeds r/10 for r = {r_grid.min():.3g}")
    bound = family.bind(lams)
    share = width / lams.size
    mid = lams.size // 2
    per_depth, analytic = {}, {}
    for om, ta in pairs:
        n = wedge(om, ta)
        if n < k0:
            continue
        val, _, _ = _phi_exact(bound, om, ta, n)
        vs = np.concatenate([np.linspace(-val.max(), -val.min(), n_v), [-val[mid]]])
        scale = family.m ** (beta * n)
        hits = np.abs(vs[:, None, None] + val[None, None, :]) <= r_grid[None, :, None]
        leb = np.minimum(hits.sum(axis=2) * share, width).max(axis=0)
        need = float(np.max(leb / (scale * r_grid)))
        per_depth[n] = max(per_depth.get(n, 0.0), need)
        slope = float(np.min(np.abs(dphi_dlambda(family, om, ta, lams).total)))
        a_need = math.inf if slope == 0 else 2.0 / (slope * scale)
        analytic[n] = max(analytic.get(n, 0.0), a_need)
    minimal = max(per_depth.values(), default=0.0)
    a_min = max(analytic.values(), default=0.0)
    details = {"analytic_minimal_C2": a_min, "analytic_passed": bool(a_min <= C2),
               "grid_passed": bool(minimal <= C2), "analytic_per_depth": dict(sorted(analytic.items())),
               "r_grid": r_grid.tolist(), "lam_step": step, "beta": beta, "k0": k0}
    return ConditionResult("blackbox2", bool(minimal <= C2 and a_min <= C2), minimal, C2,
                           dict(sorted(per_depth.items())), details)


def blackbox3_check(omega: OmegaEpsilonSet, w: BernoulliWeights, gamma: float, C3: float) -> ConditionResult:
    """``max mu([u]) <= C3 m^(-gamma |u|)`` over cylinders u (|u| <= depth) meeting the retained set."""
    per_depth = {}
    mass = cylinder_masses(w, omega.depth)
    keep = omega.mask
    for k in range(omega.depth, 0, -1):
        if keep.any():
            per_depth[k] = float(mass[keep].max() * w.m ** (gamma * k))
        else:
            per_depth[k] = 0.0
        # parents at depth k-1: group lexicographic children in blocks of m
        mass = mass.reshape(-1, w.m).sum(axis=1)
        keep = keep.reshape(-1, w.m).any(axis=1)
    minimal = max(per_depth.values(), default=0.0)
    return ConditionResult("blackbox3", bool(minimal <= C3 * (1 + 1e-12)), minimal, C3,
                           dict(sorted(per_depth.items())), {"gamma": gamma})


# --- report -----------------------------------------------------------------

@dataclass
class EtaMeasure:
    """A measure on the compact set K, as a histogram with a claimed Frostman pair (d, C)."""

    hist: MeasureHistogram
    d: float
    C: float
    label: str = "custom"

    def certify(self) -> FrostmanCertificate:
        return frostman_check(self.hist, self.d, self.C)


@dataclass
class VerifySettings:
    lambda0: float | None = None
    window: tuple | None = None
    grid: int = 512
    depth: int = 12
    n_range: tuple = (6, 14)
    pairs_per_depth: int = 64
    k0: int = 6
    epsilon: float = 0.1
    margin: float = 0.005
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    C1: float = 1.5
    C2: float = 20.0
    C3: float = 1.0
    delta_min: float = 1e-4
    r_grid: list | None = None
    seed: int = 0


@dataclass
class TransversalityReport:
    triple: ExponentTriple
    C1: float
    C2: float
    C3: float
    delta_star: float
    verdicts: dict
    eta: dict
    omega: dict
    conditions: dict
    transversality: dict
    settings: dict
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        out = {
            "passed": self.passed,
            "verdicts": self.verdicts,
            "constants": {"alpha": self.triple.alpha, "beta": self.triple.beta, "gamma": self.triple.gamma,
                          "d_eta": self.triple.d_eta, "epsilon": self.triple.epsilon, "k0": self.triple.k0,
                          "m": self.triple.m, "C1": self.C1, "C2": self.C2, "C3": self.C3,
                          "delta_star": self.delta_star},
            "blackbox0_margins": list(self.triple.margins),
            "eta": self.eta,
            "omega_epsilon": self.omega,
            "conditions": self.conditions,
            "transversality": self.transversality,
            "settings": self.settings,
            "notes": self.notes,
        }
        return _jsonable(out)

    def summary(self) -> str:
        t = self.triple
        rows = [
            ("alpha / beta / gamma", f"{t.alpha:.6g} / {t.beta:.6g} / {t.gamma:.6g}"),
            ("d_eta", f"{t.d_eta:.6g}"),
            ("blackbox0 margins", "{:.4g}, {:.4g}".format(*t.margins)),
            ("retained mass", f"{self.omega['mass']:.6g} (need > {1 - t.epsilon:.6g})"),
            ("minimal C1", f"{self.conditions['blackbox1']['minimal_constant']:.6g} (C1 = {self.C1:g})"),
            ("minimal C2 grid/analytic", "{:.6g} / {:.6g} (C2 = {:g})".format(
                self.conditions['blackbox2']['minimal_constant'],
                self.conditions['blackbox2']['details']['analytic_minimal_C2'], self.C2)),
            ("minimal C3", f"{self.conditions['blackbox3']['minimal_constant']:.6g} (C3 = {self.C3:g})"),
            ("delta*", f"{self.delta_star:.6g}"),
        ]
        rows += [(name, "pass" if ok else "FAIL") for name, ok in self.verdicts.items()]
        rows.append(("overall", "pass" if self.passed else "FAIL"))
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _path_str(p: SymbolPath) -> str:
    return f"{p.prefix}({p.tail})"


def lyapunov_profile(family: CantorFamily, w: BernoulliWeights, lams, seed: int = 0) -> np.ndarray:
    """Lyapunov exponent (nats) of the fixed symbolic measure ``w`` at each lam."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if family.is_affine:
        c, _ = family.coefficients(lams)
        return -(w.as_array()[:, None] * np.log(np.abs(c))).sum(axis=0)
    return np.array([lyapunov_exponent(family_at(family, lam), w, seed=seed).value for lam in lams])


def suggest_triple(family: CantorFamily, w: BernoulliWeights, d_eta: float, window, settings: VerifySettings,
                   probe: int = 17) -> ExponentTriple:
    """Exponents just inside the Lyapunov/entropy range over the window.

    Raises :class:`InfeasibleTriple` when no choice can satisfy the exponent
    inequalities, i.e. d_eta is too small for the family's dimension.
    """
    lm = math.log(family.m)
    L = lyapunov_profile(family, w, np.linspace(window[0], window[1], probe), settings.seed) / lm
    H = entropy(w) / lm
    lmin, lmax = float(L.min()), float(L.max())
    if not (d_eta + H / lmax > 1 and d_eta > (lmax - H) / lmin):
        raise InfeasibleTriple(f"d_eta={d_eta:.4g} with entropy/log m={H:.4g} and Lyapunov/log m in "
                               f"[{lmin:.4g}, {lmax:.4g}] admits no exponents (dimension sum too small)")
    margin = settings.margin
    for _ in range(20):
        alpha = settings.alpha if settings.alpha is not None else lmin * (1 - margin)
        beta = settings.beta if settings.beta is not None else lmax * (1 + margin)
        gamma = settings.gamma if settings.gamma is not None else H * (1 - margin)
        triple = ExponentTriple(alpha, beta, gamma, family.m, d_eta, settings.epsilon, settings.k0)
        if triple.blackbox0:
            return triple
        margin /= 2
    return triple


def assemble_report(family: CantorFamily, eta: EtaMeasure, settings: VerifySettings | None = None,
                    triple: ExponentTriple | None = None) -> TransversalityReport:
    """Run every check on ``family`` against the measure ``eta`` and collect the verdicts."""
    s = settings or VerifySettings()
    window = tuple(s.window) if s.window is not None else family.J
    lam0 = s.lambda0 if s.lambda0 is not None else window[0]
    if not (family.contains(window[0]) and family.contains(window[1]) and window[0] <= lam0 <= window[1]):
        raise ValueError(f"window {window} / lambda0 {lam0} must lie inside J={family.J}")
    c0, _ = family.coefficients(lam0)
    w = equilibrium_weights(np.abs(c0))
    cert = eta.certify()
    if triple is None:
        triple = suggest_triple(family, w, eta.d, window, s)
    lams = np.linspace(window[0], window[1], s.grid)
    step = (window[1] - window[0]) / (s.grid - 1)
    r_grid = s.r_grid if s.r_grid is not None else [10 * step * 2**k for k in range(6)]
    rng = np.random.default_rng(s.seed)

    omega = select_omega_epsilon(family, w, lams, s.depth, triple, s.C3)
    notes = []
    if omega.mass == 0:
        notes.append("retained set is empty; pair sampling skipped")
    pairs = []
    if omega.mass > 0:
        for n in range(triple.k0, s.depth + 1):
            pairs += sample_pairs(w, n, s.pairs_per_depth, rng, omega)
    bb1 = blackbox1_check(family, pairs, lams, s.C1, triple.alpha)
    bb2 = blackbox2_check(family, pairs, lams, r_grid, s.C2, triple.beta, triple.k0)
    bb3 = blackbox3_check(omega, w, triple.gamma, s.C3)
    trans = transversality_lower_bound(family, lams, s.n_range, s.pairs_per_depth, w,
                                       seed=s.seed + 1, omega=omega if omega.mass > 0 else None,
                                       delta_min=s.delta_min)
    verdicts = {
        "monotonicity": bool(monotonicity_check(family)),
        "blackbox0": bool(triple.blackbox0 and cert.passed),
        "blackbox1": bool(bb1.passed and omega.passed),
        "blackbox2": bool(bb2.passed and trans.passed and omega.passed),
        "blackbox3": bool(bb3.passed and omega.passed),
    }
    if not cert.passed:
        notes.append("Frostman certificate for eta failed; d_eta is not justified")
    return TransversalityReport(
        triple=triple, C1=s.C1, C2=s.C2, C3=s.C3, delta_star=trans.delta_star, verdicts=verdicts,
        eta={"label": eta.label, **cert.to_dict()},
        omega={"depth": omega.depth, "mass": omega.mass, "passed": omega.passed,
               "birkhoff_mass": omega.birkhoff_mass, "smb_mass": omega.smb_mass,
               "retained_cylinders": int(omega.mask.sum()), "weights": list(w.p), "lambda0": lam0,
               "window": list(window)},
        conditions={c.name: asdict(c) for c in (bb1, bb2, bb3)},
        transversality=asdict(trans),
        settings=asdict(s),
        notes=notes,
    )
