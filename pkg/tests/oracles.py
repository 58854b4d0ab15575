"""Independent reference computations used by the tests.

These deliberately avoid the package's own algorithms: high-precision
arithmetic, exact rationals and brute-force enumeration.
"""

from fractions import Fraction
from itertools import product

import mpmath

mpmath.mp.dps = 50


def moran_root(ratios):
    """Root of sum r**s = 1 by mpmath's solver at 50 digits."""
    rs = [mpmath.mpf(r) for r in ratios]
    return float(mpmath.findroot(lambda s: sum(r**s for r in rs) - 1, (mpmath.mpf("0.01"), mpmath.mpf(1)),
                                 solver="bisect"))


def minkowski_exact(A, B):
    """Sum of unions of closed intervals with Fraction endpoints, merged by brute force."""
    pairs = sorted((a0 + b0, a1 + b1) for (a0, a1), (b0, b1) in product(A, B))
    out = []
    for lo, hi in pairs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def middle_alpha_cover_exact(a: Fraction, n: int):
    """Depth-n cover of the middle-alpha set in exact rationals."""
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(n):
        ivs = sorted([(a * lo, a * hi) for lo, hi in ivs] + [(a * lo + 1 - a, a * hi + 1 - a) for lo, hi in ivs])
    return ivs


def thickness_bruteforce(ivs):
    """Newhouse thickness of a finite union by scanning outward from every gap (quadratic)."""
    gaps = [(ivs[k][1], ivs[k + 1][0]) for k in range(len(ivs) - 1)]
    best = None
    for k, (gl, gr) in enumerate(gaps):
        size = gr - gl
        left = ivs[0][0]
        for j in range(k - 1, -1, -1):
            if gaps[j][1] - gaps[j][0] > size * (1 + 1e-9):
                left = gaps[j][1]
                break
        right = ivs[-1][1]
        for j in range(k + 1, len(gaps)):
            if gaps[j][1] - gaps[j][0] > size * (1 + 1e-9):
                right = gaps[j][0]
                break
        ratio = min(gl - left, right - gr) / size
        best = ratio if best is None else min(best, ratio)
    return best


def coding_point_mp(cs, bs, symbols):
    """Pi(w) for affine maps x -> c_i x + b_i, summing the series on a finite symbol list."""
    total, scale = mpmath.mpf(0), mpmath.mpf(1)
    for s in symbols:
        total += scale * bs[s]
        scale *= cs[s]
    return total


def expand(prefix, tail, length):
    seq = list(prefix)
    while len(seq) < length:
        seq += list(tail)
    return seq[:length]


def phi_mp(c_of, b_of, omega, tau, lam, length=400):
    """phi(lam) for an affine family given as mpmath callables c_of(lam) -> list, b_of(lam) -> list."""
    cs, bs = c_of(lam), b_of(lam)
    return coding_point_mp(cs, bs, expand(*omega, length)) - coding_point_mp(cs, bs, expand(*tau, length))


def dphi_mp(c_of, b_of, omega, tau, lam):
    """d phi / d lam by mpmath numerical differentiation at 50 digits."""
    return float(mpmath.diff(lambda t: phi_mp(c_of, b_of, omega, tau, t), mpmath.mpf(lam)))


def birkhoff_mass_enumerated(ratios, weights, n, lo, hi):
    """Mass of depth-n words whose mean of -log|c| lies strictly in (lo, hi), by binomial enumeration (m = 2)."""
    from math import comb, log
    total = 0.0
    for k in range(n + 1):  # k copies of symbol 1
        avg = ((n - k) * -log(ratios[0]) + k * -log(ratios[1])) / n
        if lo < avg < hi:
            total += comb(n, k) * weights[0] ** (n - k) * weights[1] ** k
    return total
