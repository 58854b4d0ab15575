import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantorsum.errors import GridTooCoarse, IdenticalSequences, InfeasibleTriple
from cantorsum.ifs import CantorFamily, Ifs
from cantorsum.measures import BernoulliWeights, MeasureHistogram, equilibrium_weights, pushforward_histogram
from cantorsum.symbolic import SymbolPath, Word
from cantorsum.transversality import (EtaMeasure, ExponentTriple, OmegaEpsilonSet, VerifySettings, assemble_report,
                                      birkhoff_averages, birkhoff_window_check, blackbox1_check, blackbox2_check,
                                      blackbox3_check, distortion_check, dphi_dlambda, multipliers,
                                      perturbation_threshold_sweep, phi, sample_pairs, select_omega_epsilon,
                                      smb_check, transversality_lower_bound)

from oracles import birkhoff_mass_enumerated, dphi_mp, phi_mp

LN2 = math.log(2)
HOMOG = CantorFamily(c=["0.5 - lam"] * 2, b=[0, "lam + 0.5"], J=(0.05, 0.1), delta=1)
CONST = CantorFamily(c=[0.4, 0.4], b=[0, 0.6], J=(0.05, 0.1))
LINEAR = CantorFamily(c=["lam", "lam"], b=[0, "1 - lam"], J=(0.2, 0.45))
TWO = CantorFamily(c=[0.5, 0.25], b=[0, 0.75], J=(0.0, 1.0))


def P(prefix, tail, m=2):
    return SymbolPath.from_symbols(prefix, tail, m)


def homog_c(lam):
    return [mpmath.mpf("0.5") - lam] * 2


def homog_b(lam):
    return [mpmath.mpf(0), mpmath.mpf("0.5") + lam]


def test_triple_checks():
    t = ExponentTriple(1.15, 1.33, 0.99, 2, 0.868)
    assert t.blackbox0 and min(t.margins) > 0
    assert not ExponentTriple(1.0, 2.0, 0.1, 2, 0.3).blackbox0
    with pytest.raises(ValueError):
        ExponentTriple(1.3, 1.2, 0.9, 2, 0.8)
    assert ExponentTriple(1.0, 1.5, 0.5, 2, 1.0).margins[0] > 0


def test_multiplier_examples():
    assert multipliers(CONST, 0.07, P([0, 1], [1, 0]), 5).tolist() == pytest.approx([0.4] * 5)
    got = multipliers(TWO, 0.5, P([], [0, 1]), 4)
    assert got.tolist() == pytest.approx([0.5, 0.25, 0.5, 0.25])
    fam = CantorFamily(c=[0.4, 0.4], b=[0, 0.58], J=(0.0, 0.1), g=["0.001*sin(2*pi*x)*x"] * 2)
    path = P([1, 0, 0], [1, 1, 0])
    ls = multipliers(fam, 0.05, path, 6)
    bound = fam.bind(0.05)
    from cantorsum.ifs import orbit
    pts = orbit(bound, path, 6)
    for s in range(1, 7):
        x = pts[s]
        expected = 0.4 + 0.001 * (math.sin(2 * math.pi * x) + 2 * math.pi * x * math.cos(2 * math.pi * x))
        h = 1e-6
        fd = (bound.f(path[s - 1], x + h) - bound.f(path[s - 1], x - h)) / (2 * h)
        assert ls[s - 1] == pytest.approx(expected, abs=1e-12)
        assert ls[s - 1] == pytest.approx(fd, abs=1e-8)


def test_birkhoff_window_examples():
    fam = CantorFamily(c=[0.4, 0.4], b=[0, 0.6], J=(0.0, 0.1))
    lams = np.linspace(0, 0.1, 5)
    assert birkhoff_window_check(fam, lams, 8, 1.2, 1.45).all()
    assert not birkhoff_window_check(fam, lams, 8, 1.4, 1.45).any()
    w = equilibrium_weights([0.5, 0.25])
    from cantorsum.measures import cylinder_masses
    mask = birkhoff_window_check(TWO, [0.5], 10, 0.80 / LN2, 1.20 / LN2)
    got = cylinder_masses(w, 10)[mask].sum()
    assert got == pytest.approx(birkhoff_mass_enumerated([0.5, 0.25], w.p, 10, 0.80, 1.20), abs=1e-12)


@given(st.integers(1, 10), st.floats(0.05, 0.1))
def test_homogeneous_birkhoff_equals_log(n, lam):
    avg = birkhoff_averages(HOMOG, [lam], n)
    assert np.all(avg == pytest.approx(math.log(1 / (0.5 - lam)), rel=1e-14))


def test_birkhoff_nearly_affine_close():
    fam = CantorFamily(c=["0.5 - lam"] * 2, b=[0, "lam + 0.5"], J=(0.05, 0.1), g=["0.0005*x*(1-x)"] * 2)
    avg = birkhoff_averages(fam, [0.07], 6)
    assert np.allclose(avg, math.log(1 / 0.43), atol=5e-3)


def test_smb_examples():
    uni = BernoulliWeights.uniform(2)
    for n in (1, 5, 10):
        assert smb_check(uni, n, 0.95).all()
    mask = smb_check(BernoulliWeights((0.9, 0.1)), 10, 0.95)
    assert not mask[0]
    assert smb_check(BernoulliWeights((0.9, 0.1)), 10, 1e-300).all()


def test_select_omega_examples():
    lams = np.linspace(0.05, 0.1, 16)
    t = ExponentTriple(1.1, 1.4, 0.95, 2, 0.9)
    om = select_omega_epsilon(HOMOG, BernoulliWeights.uniform(2), lams, 10, t)
    assert om.mass == pytest.approx(1.0) and om.passed
    w = equilibrium_weights([0.5, 0.25])
    tight = ExponentTriple(0.9 / LN2, 1.0 / LN2, 0.5, 2, 0.9)
    om = select_omega_epsilon(TWO, w, [0.5], 12, tight)
    assert 0 < om.mass < 1
    assert om.mass == pytest.approx(birkhoff_mass_enumerated([0.5, 0.25], w.p, 12, 0.9, 1.0), abs=1e-12)
    mask = np.ones(4, bool)
    assert OmegaEpsilonSet(2, 2, mask, 0.8, 0.5).passed
    assert not OmegaEpsilonSet(2, 2, mask, 0.8, 0.1).passed


@given(st.floats(0.9, 1.25), st.floats(1.3, 1.6), st.floats(0, 0.3), st.floats(0, 0.3), st.floats(0.5, 2))
def test_omega_mass_monotone(alpha, beta, widen_a, widen_b, C3):
    w = equilibrium_weights([0.5, 0.25])
    lams = [0.5]
    t = ExponentTriple(alpha, beta, 0.8, 2, 0.9)
    wide = ExponentTriple(max(alpha - widen_a, 0.01), beta + widen_b, 0.8, 2, 0.9)
    base = select_omega_epsilon(TWO, w, lams, 10, t, C3)
    assert select_omega_epsilon(TWO, w, lams, 10, wide, C3).mass >= base.mass
    assert select_omega_epsilon(TWO, w, lams, 10, t, C3 * 1.5).mass >= base.mass


def test_phi_examples():
    with pytest.raises(IdenticalSequences):
        phi(HOMOG, P([1], [1]), P([], [1]), 0.07)
    third = CantorFamily(c=["lam", "lam"], b=[0, "1 - lam"], J=(0.2, 0.45))
    assert phi(third, P([], [1]), P([], [0]), 1 / 3).value == pytest.approx(1.0)
    for lam in (0.2, 0.3, 0.45):
        v = phi(LINEAR, P([1], [0]), P([], [0]), lam)
        assert v.value == pytest.approx(1 - lam, abs=1e-15)
        assert v.error < 1e-14


def test_phi_truncated_route_has_bound():
    om, ta = P([0, 1, 1], [0, 1]), P([0, 1, 0], [1])
    exact = phi(HOMOG, om, ta, 0.07)
    trunc = phi(HOMOG, om, ta, 0.07, depth=40)
    assert abs(exact.value - trunc.value) <= trunc.error + exact.error + 1e-15
    fam = CantorFamily(c=["0.5 - lam"] * 2, b=[0, "lam + 0.5"], J=(0.05, 0.1), g=["0.0005*x*(1-x)"] * 2)
    a, b = phi(fam, om, ta, 0.07), phi(fam, om, ta, 0.07, depth=60)
    assert abs(a.value - b.value) <= a.error + b.error


def test_phi_stable_for_deep_wedge():
    u = [0, 1] * 15
    om, ta = P(u + [0], [1]), P(u + [1], [0])
    got = phi(HOMOG, om, ta, 0.07).value
    ref = float(phi_mp(homog_c, homog_b, (u + [0], [1]), (u + [1], [0]), mpmath.mpf("0.07")))
    assert got == pytest.approx(ref, rel=1e-12)


def test_dphi_examples():
    d = dphi_dlambda(LINEAR, P([1], [0]), P([], [0]), 0.3)
    assert d.total == pytest.approx(-1.0, abs=1e-14)
    trans = CantorFamily(c=[0.4, 0.4], b=[0, "0.55 + lam"], J=(0.0, 0.05))
    d = dphi_dlambda(trans, P([0, 1], [1, 0]), P([0, 0], [1]), 0.02)
    assert d.S1 == 0.0 and d.S2 == 0.0 and d.total == pytest.approx(d.S3, abs=1e-15)


@st.composite
def pairs(draw, max_wedge=12):
    n = draw(st.integers(0, max_wedge))
    u = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    s = draw(st.integers(0, 1))
    rest = [draw(st.lists(st.integers(0, 1), max_size=4)) for _ in range(2)]
    tails = [draw(st.lists(st.integers(0, 1), min_size=1, max_size=3)) for _ in range(2)]
    return (u + [s] + rest[0], tails[0]), (u + [1 - s] + rest[1], tails[1])


@given(pairs(), st.floats(0.051, 0.099))
def test_dphi_identity_and_oracle(pair, lam):
    (p1, t1), (p2, t2) = pair
    om, ta = P(p1, t1), P(p2, t2)
    d = dphi_dlambda(HOMOG, om, ta, lam)
    assert abs(d.total - (d.S1 + d.S2 + d.S3)) <= 1e-12 * max(1.0, abs(d.total))
    ref = dphi_mp(homog_c, homog_b, (p1, t1), (p2, t2), lam)
    assert d.total == pytest.approx(ref, rel=1e-9, abs=1e-300)
    h = 1e-6 * 0.05
    fd = (phi(HOMOG, om, ta, lam + h).value - phi(HOMOG, om, ta, lam - h).value) / (2 * h)
    assert d.total == pytest.approx(fd, rel=1e-5)


@given(pairs(), st.floats(0.051, 0.099))
def test_s1_sign_and_s2_zero(pair, lam):
    (p1, t1), (p2, t2) = pair
    d = dphi_dlambda(HOMOG, P(p1, t1), P(p2, t2), lam)
    assert d.S2 == 0.0
    sign = -np.sign(d.product * d.gap)
    assert all(np.sign(term) == sign for term in d.s1_terms)


def test_dphi_nearly_affine_matches_finite_difference():
    fam = CantorFamily(c=["0.5 - lam"] * 2, b=[0, "lam + 0.5"], J=(0.05, 0.1), g=["0.001*sin(2*pi*x)*x*lam"] * 2)
    om, ta = P([0, 1, 1, 0, 1], [0, 1]), P([0, 1, 1, 1], [0])
    d = dphi_dlambda(fam, om, ta, 0.07)
    h = 1e-6
    fd = (phi(fam, om, ta, 0.07 + h).value - phi(fam, om, ta, 0.07 - h).value) / (2 * h)
    assert d.total == pytest.approx(fd, rel=1e-6)
    assert d.S1 + d.S2 + d.S3 == pytest.approx(d.total, abs=1e-12)
    assert d.S2 != 0.0


def test_transversality_examples():
    lams = np.linspace(0.05, 0.1, 64)
    res = transversality_lower_bound(CONST, lams, (4, 8), pairs_per_depth=8)
    assert res.delta_star == 0.0 and not res.passed
    res = transversality_lower_bound(HOMOG, lams, (6, 14), pairs_per_depth=32)
    assert res.delta_star > 0 and res.stable


def test_perturbation_threshold_reported():
    def make(amp):
        return CantorFamily(c=["0.5 - lam"] * 2, b=[0, "lam + 0.5"], J=(0.05, 0.1), g=[f"{amp}*sin(2*pi*x)*x"] * 2)
    lams = np.linspace(0.05, 0.1, 64)
    rows, threshold = perturbation_threshold_sweep(make, [0.0, 0.02, 0.1], lams, (6, 9), pairs_per_depth=16)
    assert threshold == 0.1
    assert rows[0][1] > rows[1][1] > rows[2][1]


def test_distortion_examples():
    rng = np.random.default_rng(3)
    words = [tuple(rng.integers(0, 2, size=n)) for n in range(1, 13) for _ in range(10)]
    assert distortion_check(HOMOG, 0.07, words).constant == pytest.approx(1.0, abs=1e-9)
    consts = []
    for amp in (0.0, 2.5e-4, 5e-4):
        fam = CantorFamily(c=["0.5 - lam"] * 2, b=[0, "lam + 0.5"], J=(0.05, 0.1), g=[f"{amp}*x*(1-x)"] * 2)
        consts.append(distortion_check(fam, 0.07, words).constant)
    assert fam.c2_norm == pytest.approx(1e-3)
    assert consts[-1] <= 1.01
    assert consts == sorted(consts)


def homog_pairs(fam_w, depths, per=8, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for n in depths:
        out += sample_pairs(fam_w, n, per, rng)
    return out


def test_blackbox1_examples():
    pairs_ = homog_pairs(BernoulliWeights.uniform(2), range(0, 11))
    lams = np.linspace(0.05, 0.1, 16)
    ok = blackbox1_check(CONST, pairs_, lams, 1.0, 1.2)
    assert ok.passed and ok.minimal_constant <= 1.0
    zero = blackbox1_check(CONST, [p for p in pairs_ if p[0][0] != p[1][0]], lams, 1.0, 1.2)
    assert zero.passed
    bad = blackbox1_check(CONST, pairs_, lams, 1.0, 1.4)
    assert not bad.passed and bad.details["growth_per_depth"] > 1


@given(st.floats(0.8, 1.3), st.floats(0.0, 0.3))
def test_blackbox1_monotone_in_alpha(alpha, drop):
    pairs_ = homog_pairs(BernoulliWeights.uniform(2), range(0, 8), per=3)
    lams = np.linspace(0.05, 0.1, 8)
    hi = blackbox1_check(HOMOG, pairs_, lams, 1.0, alpha).minimal_constant
    lo = blackbox1_check(HOMOG, pairs_, lams, 1.0, alpha - drop).minimal_constant
    assert lo <= hi


def test_blackbox2_linear_phi():
    lams = np.linspace(0.2, 0.45, 2001)
    res = blackbox2_check(LINEAR, [(P([1], [0]), P([], [0]))], lams, [0.01, 0.02], 2.1, 1.0, 0)
    assert res.minimal_constant == pytest.approx(2.0, abs=0.02)
    assert res.details["analytic_minimal_C2"] == pytest.approx(2.0)
    assert res.passed
    with pytest.raises(GridTooCoarse):
        blackbox2_check(LINEAR, [(P([1], [0]), P([], [0]))], lams, [1e-4], 2.1, 1.0, 0)


def test_blackbox2_degenerate():
    lams = np.linspace(0.05, 0.1, 512)
    pairs_ = homog_pairs(BernoulliWeights.uniform(2), range(2, 6), per=4)
    step = 0.05 / 511
    res = blackbox2_check(CONST, pairs_, lams, [10 * step], 20.0, 1.33, 2)
    assert not res.passed and res.details["analytic_minimal_C2"] == math.inf


def test_blackbox3_uniform():
    lams = np.linspace(0.05, 0.1, 8)
    t = ExponentTriple(1.1, 1.4, 0.95, 2, 0.9)
    om = select_omega_epsilon(HOMOG, BernoulliWeights.uniform(2), lams, 8, t)
    res = blackbox3_check(om, BernoulliWeights.uniform(2), 0.95, 1.0)
    assert res.passed and res.minimal_constant == pytest.approx(2 ** (-0.05))


def middle(a, depth=12, C=4.0):
    ifs = Ifs.middle_alpha(a)
    hist = pushforward_histogram(ifs, BernoulliWeights.uniform(2), depth, 2.0**-depth)
    return EtaMeasure(hist, math.log(2) / math.log(1 / a), C, f"middle-{a}")


def test_report_homogeneous_with_uniform_eta():
    eta = EtaMeasure(MeasureHistogram.uniform(0.0, 1.0, 1e-3), 1.0, 2.01, "uniform")
    settings = VerifySettings(grid=128, depth=10, n_range=(6, 10), pairs_per_depth=16)
    rep = assemble_report(HOMOG, eta, settings)
    assert rep.verdicts["blackbox0"]
    assert rep.passed == all(rep.verdicts.values())
    text = json.dumps(rep.to_dict())
    assert json.loads(text)["constants"]["d_eta"] == 1.0
    assert "delta*" in rep.summary()


def test_report_infeasible():
    fam = CantorFamily(c=["0.1 - lam"] * 2, b=[0, "0.9 + lam"], J=(0.0, 0.01))
    eta = EtaMeasure(MeasureHistogram.uniform(0.0, 1.0, 1e-3), 0.5, 2.01, "thin")
    with pytest.raises(InfeasibleTriple):
        assemble_report(fam, eta, VerifySettings(grid=32, depth=6, n_range=(2, 4)))


def test_report_constant_family_fails():
    rep = assemble_report(CONST, middle(0.45), VerifySettings(grid=128, depth=8, n_range=(4, 8), k0=2,
                                                             pairs_per_depth=8))
    assert rep.delta_star == 0.0 and not rep.verdicts["blackbox2"] and not rep.passed


def test_sample_pairs_exact_wedge():
    from cantorsum.symbolic import wedge
    rng = np.random.default_rng(0)
    for n in range(0, 8):
        for a, b in sample_pairs(BernoulliWeights((0.7, 0.3)), n, 5, rng):
            assert wedge(a, b) == n
    assert isinstance(Word((0,), 2), Word)
