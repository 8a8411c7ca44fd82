"""End-to-end checks: every headline behaviour of the package, pinned
against independently derived closed forms and brute-force oracles.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from cfforge import catalog
from cfforge.groups import (
    Heisenberg,
    HeisenbergCongruence,
    IntLine,
    ZModulus,
    coset_table,
)
from cfforge.measures import FinMeasure, convolve_all
from cfforge.cfcore import (
    TERMWISE_ZERO,
    CFPoint,
    NeedsDeeperTail,
    act,
    compose_schedules,
    cylinder_measure,
    folner_defect,
    haar_totals,
    reduce_params,
    rn_derivative,
    telescope,
    validate_params,
)
from cfforge.factors import (
    check_equivariance,
    coset_compatibility,
    finite_factor_map,
    finite_factor_scan,
)
from cfforge.odometers import (
    cover_injectivity_check,
    isomorphism_check,
    normal_cover,
    odometer_compatibility,
    rank_one_cover,
    tau_check,
    validate_chain,
)
from cfforge.zstack import first_return_oracle, induced_base

from conftest import points_equal, weighted_fgsw
from test_factors import brute_force_window_minima, dyadic_term


# ---------------------------------------------------------------------------
# 1. the dyadic-heavy action on Z: structure and exact level totals
# ---------------------------------------------------------------------------

def test_criterion_01_fgsw_validates_with_exact_totals(fgsw):
    rep = validate_params(fgsw, depth=8)
    assert rep.ok
    for N in range(13):
        assert fgsw.nu(N).total == 2 - Fraction(1, 2 ** N)
        assert catalog.fgsw_height(N) == 2 ** N * (2 ** (N + 1) - 1)
        assert len(fgsw.F(N)) == catalog.fgsw_height(N)


# ---------------------------------------------------------------------------
# 2. the dyadic odometer factor: termwise-zero tail and pointwise
#    stabilization
# ---------------------------------------------------------------------------

def test_criterion_02_dyadic_factor_stabilizes(fgsw, rng):
    ctx = fgsw.ctx
    for k in range(1, 7):
        terms, verdict = coset_compatibility(fgsw, ZModulus(ctx, 2 ** k),
                                             depth=10)
        assert terms == [dyadic_term(n, k) for n in range(1, 11)]
        assert verdict.tag == TERMWISE_ZERO and verdict.stage == k
    for k in (2, 3, 4):
        space = coset_table(ctx, ZModulus(ctx, 2 ** k))
        for _ in range(100):
            tail = tuple(rng.choice(sorted(fgsw.C(n))) for n in range(1, 7))
            x = CFPoint(0, 0, tail)
            j, trace = finite_factor_map(fgsw, space, x)
            # stage m > k copies are divisible by 2^k, so the trace freezes
            assert len(set(trace[k:])) == 1
            assert j == trace[-1]
            eq = check_equivariance(fgsw, space, 1, x)
            assert eq in (True, None)


# ---------------------------------------------------------------------------
# 3. no odd finite factors: scans refute p in {3, 5, 7} with a uniform gap
# ---------------------------------------------------------------------------

def test_criterion_03_odd_moduli_refuted(fgsw):
    for p in (3, 5, 7):
        rep = finite_factor_scan(fgsw, ZModulus(fgsw.ctx, p), max_depth=10)
        assert not rep.passes
        assert min(rep.minima) >= Fraction(1, 4)
        assert list(rep.minima) == brute_force_window_minima(fgsw, p,
                                                             rep.schedule)


# ---------------------------------------------------------------------------
# 4. the action is not the 2-adic odometer: a uniform cylinder-matching
#    obstruction
# ---------------------------------------------------------------------------

def test_criterion_04_not_isomorphic_to_2adic_odometer(fgsw, z2chain):
    rep = isomorphism_check(fgsw, z2chain, n=1, eps=Fraction(1, 4),
                            l_max=8, m_max=8)
    assert not rep.passes
    # whenever the coset grid is at least as deep as the cylinder level,
    # every matching attempt misses by at least 1/4
    for (l, m), v in rep.envelopes.items():
        if m >= l:
            assert v >= Fraction(1, 4)
    for l in range(1, 9):
        assert rep.envelopes[(l, 8)] == Fraction(1, 4)


# ---------------------------------------------------------------------------
# 5. the Heisenberg action: sizes, infinite invariant measure, odometer
#    compatibility, congruence chain
# ---------------------------------------------------------------------------

def test_criterion_05_heisenberg_action(heis):
    for n in range(7):
        assert len(heis.F(n)) == 4 ** n * catalog.heisenberg_height(n)
    out = haar_totals(heis, depth=8)
    for n in range(1, 9):
        assert out["factors"][n - 1] == 1 + Fraction(9, 4 * (4 ** n - 3))
    chain = catalog.catalog("heisenberg-2adic-chain")
    terms, verdict = odometer_compatibility(heis, chain, depth=8, shift=1)
    assert verdict.tag == TERMWISE_ZERO and all(t == 0 for t in terms)
    ctx = heis.ctx
    sigmas = [HeisenbergCongruence(ctx, 2 ** q, 2 ** q, 4 ** q)
              for q in range(1, 6)]
    for fine, coarse in zip(sigmas[1:], sigmas):
        assert all(coarse.member(g) for g in fine.gens())
        assert fine.index() > coarse.index()


# ---------------------------------------------------------------------------
# 6. non-normal congruence chain: normal cover with index-2 steps and an
#    injective coset encoding
# ---------------------------------------------------------------------------

def test_criterion_06_nonnormal_chain_cover():
    spec = catalog.catalog("heisenberg-nonnormal")
    rep = normal_cover(spec, 5)
    for n, lv in enumerate(rep.levels, start=1):
        assert lv.ratio == 2
        assert lv.certificate["route"] == "squeeze"
        assert (lv.core.a, lv.core.b, lv.core.c) == (2 ** n,) * 3
        assert lv.alternating
    for level in (1, 2):
        assert cover_injectivity_check(spec, rep, level)
    # the coset-key tuple is exactly as fine as the deepest subgroup: two
    # box elements share all four keys iff they lie in the same level-4
    # coset, so the encoding is injective on the coset space it targets
    ctx = spec.ctx
    gammas = [spec.gamma(n) for n in range(1, 5)]
    buckets = {}
    for g in itertools.product(range(16), range(16), range(16)):
        key = tuple(G.coset_key(g) for G in gammas)
        buckets.setdefault(key, []).append(g)
    assert len(buckets) == gammas[-1].index() == 2048
    for key, members in buckets.items():
        base = members[0]
        for g in members[1:]:
            assert gammas[-1].member(ctx.mul(ctx.inv(base), g))


# ---------------------------------------------------------------------------
# 7. two non-conjugate stabilizer factors over a six-element homogeneous
#    space
# ---------------------------------------------------------------------------

def test_criterion_07_two_factor_scenario():
    scen = catalog.catalog("s3-two-factors")
    assert len(scen.points) == 6
    for y in scen.points:
        assert scen.orbit(y) == frozenset(scen.points)
        assert scen.stabilizer(y) == (0,)
    p1 = scen.projection_partition(0)
    p2 = scen.projection_partition(1)
    assert p1 != p2
    assert all(len(cls) == 2 for cls in p1) and all(len(c) == 2 for c in p2)


# ---------------------------------------------------------------------------
# 8. structural invariants under randomized parameters
# ---------------------------------------------------------------------------

rows_st = st.lists(st.tuples(*[st.integers(1, 9)] * 4), min_size=2,
                   max_size=4)


@settings(max_examples=200, deadline=None)
@given(rows=rows_st, picks=st.lists(st.integers(0, 3), min_size=4,
                                    max_size=4),
       g=st.integers(-3, 3), h=st.integers(-3, 3))
def test_criterion_08a_rn_chain_rule(rows, picks, g, h):
    T = weighted_fgsw(rows)
    depth = len(rows)
    tail = tuple(sorted(T.C(n))[picks[n - 1]] for n in range(1, depth + 1))
    x = CFPoint(0, 0, tail)
    try:
        hx = act(T, h, x)
        lhs = rn_derivative(T, g + h, x)
        rhs = rn_derivative(T, g, hx) * rn_derivative(T, h, x)
    except NeedsDeeperTail:
        assume(False)
    assert lhs == rhs


@settings(max_examples=200, deadline=None)
@given(rows=rows_st, data=st.data())
def test_criterion_08b_measure_recursion(rows, data):
    T = weighted_fgsw(rows)
    depth = len(rows)
    n = data.draw(st.integers(0, depth - 1))
    f = data.draw(st.integers(0, len(T.F(n)) - 1))
    c = sorted(T.C(n + 1))[data.draw(st.integers(0, 3))]
    assert cylinder_measure(T, n + 1, f + c) == \
        cylinder_measure(T, n, f) * T.kappa(n + 1).weight(c)


@settings(max_examples=60, deadline=None)
@given(inner=st.sets(st.integers(1, 5), min_size=1, max_size=4),
       picks=st.lists(st.integers(0, 3), min_size=6, max_size=6))
def test_criterion_08c_telescoping_invariance(fgsw, inner, picks):
    l = (0,) + tuple(sorted(inner)) + (6,)
    S, iota = telescope(fgsw, l)
    for k in range(len(l)):
        assert S.nu(k).total == fgsw.nu(l[k]).total
        assert len(S.F(k)) == len(fgsw.F(l[k]))
    tail = tuple(sorted(fgsw.C(n))[picks[n - 1]] for n in range(1, 7))
    x = CFPoint(0, 0, tail)
    y = iota(x)
    assert cylinder_measure(S, len(l) - 1, y.f) \
        == cylinder_measure(fgsw, 6, sum(tail))
    # composing with a sub-schedule matches the composed schedule
    m = (0, 1, len(l) - 1)
    S2, iota2 = telescope(S, m)
    S3, iota3 = telescope(fgsw, compose_schedules(l, m))
    assert iota2(iota(x)) == iota3(x)
    for k in range(len(m)):
        assert S2.nu(k).total == S3.nu(k).total


@settings(max_examples=100, deadline=None)
@given(rows=rows_st, data=st.data())
def test_criterion_08d_reduction_scaling(rows, data):
    T = weighted_fgsw(rows)
    depth = len(rows)
    keeps = [data.draw(st.integers(2, 4)) for _ in range(depth)]
    As = [sorted(T.C(n))[:keeps[n - 1]] for n in range(1, depth + 1)]
    S, scaling, _iota = reduce_params(T, As, bound=Fraction(4))
    for n in range(1, depth + 1):
        f = data.draw(st.sampled_from(sorted(S.F(n))))
        if S.nu(n).weight(f) == 0:
            continue
        assert S.nu(n).weight(f) * scaling(n) == T.nu(n).weight(f)


@settings(max_examples=200, deadline=None)
@given(picks=st.lists(st.integers(0, 3), min_size=6, max_size=6),
       g=st.integers(-5, 5), h=st.integers(-5, 5))
def test_criterion_08e_act_group_law(fgsw, picks, g, h):
    tail = tuple(sorted(fgsw.C(n))[picks[n - 1]] for n in range(1, 7))
    x = CFPoint(0, 0, tail)
    try:
        both = act(fgsw, g, act(fgsw, h, x))
        direct = act(fgsw, g + h, x)
    except NeedsDeeperTail:
        assume(False)
    assert points_equal(fgsw, both, direct)


@settings(max_examples=200, deadline=None)
@given(specs=st.lists(
    st.dictionaries(st.integers(-4, 4), st.fractions(min_value=0,
                                                     max_value=3),
                    min_size=1, max_size=4),
    min_size=1, max_size=3))
def test_criterion_08f_convolution_mass(specs):
    ctx = IntLine()
    ms = [FinMeasure(ctx, spec) for spec in specs]
    out = convolve_all(ctx, ms)
    total = Fraction(1)
    for m in ms:
        total *= m.total
    assert out.total == total


# ---------------------------------------------------------------------------
# 9. the induced first-return map on the base matches a step-by-step walk
# ---------------------------------------------------------------------------

def test_criterion_09_first_return_matches_walk(fgsw, rng):
    checked = 0
    while checked < 100:
        tail = tuple(rng.choice(sorted(fgsw.C(n))) for n in range(1, 6))
        x = CFPoint(0, 0, tail)
        try:
            Rx, theta = induced_base(fgsw, x)
        except NeedsDeeperTail:
            continue
        steps, y = first_return_oracle(fgsw, x)
        assert steps == 1 + theta
        assert y.tail == Rx.tail
        checked += 1


# ---------------------------------------------------------------------------
# 10. rank-one covers of coset chains: valid parameters and exact coset
#     fiber counts
# ---------------------------------------------------------------------------

def test_criterion_10_rank_one_covers(z2chain):
    build = rank_one_cover(z2chain, 3)
    assert build.Cs == [[0, 1], [0, 6], [0, 20], [0, 40]]
    assert validate_params(build.params, depth=3).ok
    for n in range(1, 4):
        # uniform weights push forward to uniform coset masses: the fiber
        # count equals the index of the next subgroup
        assert tau_check(z2chain, build.Cs, n) == z2chain.gamma(n + 1).index()
        assert build.params.kappa(n).max_weight() * len(build.params.C(n)) == 1
    spec = catalog.catalog("heisenberg-2adic-chain")
    assert validate_chain(spec, depth=4).ok
    hbuild = rank_one_cover(spec, 2)
    assert validate_params(hbuild.params, depth=2).ok
    for n in range(1, 3):
        assert tau_check(spec, hbuild.Cs, n) == spec.gamma(n + 1).index()


# ---------------------------------------------------------------------------
# 11. exact amenability defects for the shapes in both groups
# ---------------------------------------------------------------------------

def test_criterion_11_folner_defects(fgsw, heis):
    prev = None
    for n in range(1, 9):
        d = folner_defect(fgsw, 1, n)
        assert d == Fraction(2, catalog.fgsw_height(n))
        assert prev is None or d < prev
        prev = d
    for n in range(1, 7):
        h = catalog.heisenberg_height(n)
        assert folner_defect(heis, (0, 1, 0), n) == Fraction(2, 2 ** n)
        assert folner_defect(heis, (0, 0, 1), n) == Fraction(2, h)
        assert folner_defect(heis, (1, 0, 0), n) == \
            Fraction(2, 2 ** n) + Fraction((2 ** n - 1) ** 2, 2 ** n * h)
        # the shear term keeps the x defect comparable to the y defect
        assert folner_defect(heis, (1, 0, 0), n) < Fraction(3, 2 ** n)
