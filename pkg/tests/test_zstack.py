from fractions import Fraction

import pytest

from cfforge import catalog
from cfforge.cfcore import CFPoint, NeedsDeeperTail
from cfforge.zstack import (
    columns,
    decompose_base,
    first_return_oracle,
    height,
    induced_base,
    render_svg,
    spacer_map,
    top_aligned,
)


def test_heights(fgsw):
    assert [height(fgsw, n) for n in range(5)] == [1, 6, 28, 120, 496]


def test_columns_partition_with_exact_totals(fgsw):
    cols = columns(fgsw, 3)
    for n, lay in enumerate(cols):
        assert lay.total() == 2 - Fraction(1, 2 ** n)
        # intervals tile [0, total) without gaps
        spans = sorted(lay.intervals.values())
        assert spans[0][0] == 0
        for (a, b), (c, d) in zip(spans, spans[1:]):
            assert b == c
        assert spans[-1][1] == lay.total()
    # cutting order: copies of level 0 appear left to right by ascending c
    lay1 = cols[1]
    for c, c2 in zip((0, 1, 4, 5), (1, 4, 5)):
        assert lay1.intervals[c][1] <= lay1.intervals[c2][0] or c + 1 == c2


def test_spacer_maps(fgsw):
    assert spacer_map(fgsw, 1) == {0: 0, 1: 2, 4: 0, 5: 0}
    assert spacer_map(fgsw, 2) == {0: 0, 6: 4, 16: 0, 22: 0}
    assert all(top_aligned(fgsw, n) for n in range(1, 8))


def test_induced_base_map(fgsw):
    Rx, theta = induced_base(fgsw, CFPoint(0, 0, (1, 6, 64)))
    assert Rx.tail == (4, 6, 64) and theta == 2
    Rx2, th2 = induced_base(fgsw, CFPoint(0, 0, (5, 0, 64)))
    assert Rx2.tail == (0, 6, 64) and th2 == 0
    Rx3, th3 = induced_base(fgsw, CFPoint(0, 0, (5, 22, 64)))
    assert Rx3.tail == (0, 0, 92) and th3 == 0
    with pytest.raises(NeedsDeeperTail):
        induced_base(fgsw, CFPoint(0, 0, (5, 22, 92)))


def test_decompose_base_rejects_spacers(fgsw):
    assert decompose_base(fgsw, 7, 2) == (1, 6)
    assert decompose_base(fgsw, 2, 2) is None  # 2 is a spacer level
    assert decompose_base(fgsw, 0, 0) == ()


def test_first_return_matches_induced_map(fgsw, rng):
    for _ in range(40):
        tail = tuple(rng.choice(sorted(fgsw.C(n))) for n in range(1, 5))
        x = CFPoint(0, 0, tail)
        try:
            Rx, theta = induced_base(fgsw, x)
        except NeedsDeeperTail:
            continue
        steps, y = first_return_oracle(fgsw, x)
        assert steps == 1 + theta
        assert y.tail == Rx.tail


def test_svg_is_deterministic(fgsw):
    a = render_svg(fgsw, 2)
    b = render_svg(fgsw, 2)
    assert a == b
    assert a.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
    assert 'data-lo="0/1"' in a and 'data-stage="2"' in a
