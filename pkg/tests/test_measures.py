from fractions import Fraction

import pytest

from cfforge.groups import Heisenberg, IntLine, IntervalSet
from cfforge.measures import (
    FinMeasure,
    UniformMeasure,
    convolve_all,
    fmt_frac,
    parse_frac,
)


def test_frac_formatting_round_trip():
    assert fmt_frac(Fraction(3, 4)) == "3/4"
    assert parse_frac("3/4") == Fraction(3, 4)
    assert parse_frac(2) == Fraction(2)
    assert fmt_frac(Fraction(0)) == "0/1"


def test_convolution_oracle_on_integers():
    ctx = IntLine()
    a = FinMeasure.uniform(ctx, (0, 1))
    b = FinMeasure.uniform(ctx, (0, 2))
    assert a.convolve(b) == FinMeasure.uniform(ctx, (0, 1, 2, 3))
    # collision adds mass
    c = a.convolve(a)
    assert c.weight(1) == Fraction(1, 2) and c.weight(0) == Fraction(1, 4)


def test_convolution_order_matters_off_center():
    ctx = Heisenberg()
    da = FinMeasure.point(ctx, (1, 0, 0))
    db = FinMeasure.point(ctx, (0, 1, 0))
    assert da.convolve(db).weight((1, 1, 1)) == 1
    assert db.convolve(da).weight((1, 1, 0)) == 1


def test_uniform_measure_matches_explicit():
    ctx = IntLine()
    u = UniformMeasure(ctx, IntervalSet(4), Fraction(1, 8))
    assert u.total == Fraction(1, 2)
    assert u == FinMeasure(ctx, {i: Fraction(1, 8) for i in range(4)})
    assert u.mass_of([1, 2, 9]) == Fraction(1, 4)
    r = u.restrict([0, 3, 5])
    assert isinstance(r, FinMeasure) and r.total == Fraction(1, 4)
    assert u.scale(2).total == 1


def test_zero_weights_dropped_and_items_sorted():
    ctx = IntLine()
    m = FinMeasure(ctx, {3: Fraction(0), -1: Fraction(1, 3), 2: Fraction(2, 3)})
    assert m.support_size() == 2
    assert [g for g, _ in m.items()] == [-1, 2]


def test_convolve_all_total_product():
    ctx = IntLine()
    ms = [FinMeasure.from_weights(ctx, {0: Fraction(1, 2), k: Fraction(1, 3)})
          for k in (1, 5, 9)]
    out = convolve_all(ctx, ms)
    assert out.total == Fraction(5, 6) ** 3
