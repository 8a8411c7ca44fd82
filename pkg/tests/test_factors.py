import itertools
from fractions import Fraction

import pytest

from cfforge import catalog
from cfforge.groups import IntLine, ZModulus, coset_table
from cfforge.measures import FinMeasure
from cfforge.cfcore import CFPoint, TERMWISE_ZERO
from cfforge.factors import (
    check_equivariance,
    check_sum_split,
    coset_compatibility,
    default_schedule,
    finite_factor_map,
    finite_factor_scan,
    partial_sum_bijection,
    split_coordinates,
    split_factor_value,
    total_ergodicity_scan,
)


def dyadic_term(n, k):
    """Stage-n escape mass outside 2^k Z, derived by residue counting."""
    if n > k:
        return Fraction(0)
    return Fraction(1, 2) if 2 * n >= k else Fraction(3, 4)


def test_dyadic_compatibility_closed_form(fgsw):
    for k in range(1, 7):
        terms, verdict = coset_compatibility(fgsw, ZModulus(fgsw.ctx, 2 ** k),
                                             depth=10)
        assert terms == [dyadic_term(n, k) for n in range(1, 11)]
        assert verdict.tag == TERMWISE_ZERO
        assert verdict.stage == k


def test_conjugation_is_a_no_op_in_an_abelian_group(fgsw):
    base, _ = coset_compatibility(fgsw, ZModulus(fgsw.ctx, 8), depth=6)
    moved, _ = coset_compatibility(fgsw, ZModulus(fgsw.ctx, 8), g=5, depth=6)
    assert base == moved


def test_factor_map_and_equivariance(fgsw):
    space = coset_table(fgsw.ctx, ZModulus(fgsw.ctx, 4))
    x = CFPoint(0, 0, (1, 6, 64, 0, 0))
    j, trace = finite_factor_map(fgsw, space, x)
    assert j == space.locate(1 + 6)  # later stages are 0 mod 4
    assert check_equivariance(fgsw, space, 3, x) is True
    # too-short tails stay unstabilized
    j2, _ = finite_factor_map(fgsw, space, CFPoint(0, 0, (1,)), window=3)
    assert j2 is None


def test_scan_finds_the_dyadic_factor(fgsw):
    rep = finite_factor_scan(fgsw, ZModulus(fgsw.ctx, 2), max_depth=10)
    assert rep.passes
    assert rep.schedule == (0, 1, 3, 6, 10)
    assert rep.start == 1
    assert all(m == 0 for m in rep.path_masses)
    assert rep.telescoping == (0, 1, 3, 6, 10)


def brute_force_window_minima(T, p, qs):
    """Independent route: enumerate stage tuples per window and count the
    best achievable single-residue mass."""
    minima = []
    for a, b in zip(qs, qs[1:]):
        mass = {}
        stages = [sorted(T.C(n)) for n in range(a + 1, b + 1)]
        weights = [T.kappa(n) for n in range(a + 1, b + 1)]
        for tup in itertools.product(*stages):
            w = Fraction(1)
            for n, c in enumerate(tup):
                w *= weights[n].weight(c)
            r = sum(tup) % p
            mass[r] = mass.get(r, Fraction(0)) + w
        best = Fraction(0)
        for i in range(p):
            for j in range(p):
                best = max(best, mass.get((j - i) % p, Fraction(0)))
        minima.append(1 - best)
    return minima


@pytest.mark.parametrize("p", (3, 5, 7))
def test_scan_refutes_odd_moduli(fgsw, p):
    rep = finite_factor_scan(fgsw, ZModulus(fgsw.ctx, p), max_depth=10)
    assert not rep.passes
    assert min(rep.minima) >= Fraction(1, 4)
    assert list(rep.minima) == brute_force_window_minima(fgsw, p,
                                                         rep.schedule)


def test_total_ergodicity_scan_mixed(fgsw):
    ctx = fgsw.ctx
    out = total_ergodicity_scan(
        fgsw, [("mod:3", ZModulus(ctx, 3)), ("mod:2", ZModulus(ctx, 2))])
    assert not out["all_refuted"]
    assert out["reports"]["mod:2"].passes
    assert not out["reports"]["mod:3"].passes


def test_default_schedule_shape():
    assert default_schedule(10) == (0, 1, 3, 6, 10)
    assert default_schedule(9) == (0, 1, 3, 6)


def test_sum_split_recomposition(fgsw):
    split = catalog.catalog("fgsw-split")
    assert check_sum_split(fgsw, split, 8)
    bad = catalog.fgsw_split(kappa2_weight=lambda n: Fraction(1, 3))
    with pytest.raises(AssertionError):
        check_sum_split(fgsw, bad, 3)


def test_partial_sum_factor_values(fgsw):
    split = catalog.catalog("fgsw-split")
    for n in range(1, 7):
        assert partial_sum_bijection(split, n, 2 ** n)
    x = CFPoint(0, 0, (1, 0, 0, 0, 0, 0))
    coords = split_coordinates(fgsw, split, x)
    assert coords[0] == (1, 0)
    # the stage-1 first-coordinate 1 survives into every level value
    for n in range(1, 7):
        assert split_factor_value(fgsw, split, x, n, 2 ** n) == 1
    y = CFPoint(0, 0, (4, 0, 0, 0, 0, 0))  # 4 = 0 + 4^1: pure second part
    assert split_coordinates(fgsw, split, y)[0] == (0, 4)
    assert split_factor_value(fgsw, split, y, 1, 2) == 0
    assert split_factor_value(fgsw, split, y, 3, 8) == 4
