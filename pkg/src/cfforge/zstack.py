"""Interval realization over the integers: columns, spacers, first returns.

For integer parameters whose shapes are the intervals [0, h_n), level i of
stage n is an interval I(i, n) of length nu_n(i).  Stage n+1 cuts each
I(i, n) into the copies I(i+c, n+1) (ascending c, left to right) and lays
the fresh spacer levels end-to-end above the old total mass.  The spacer
count above copy c is s_n+1-style data recoverable purely from the gaps
between consecutive copies, and the transformation induced on the base
stage-0 set is the tail odometer with return time 1 + (spacers entered).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import IntLine, IntervalSet
from .cfcore import CFPoint, NeedsDeeperTail, act, check_point


def height(T, n):
    F = T.F(n)
    assert isinstance(T.ctx, IntLine)
    if isinstance(F, IntervalSet):
        return F.h
    levels = sorted(F)
    assert levels == list(range(len(levels))), "shape is not an interval"
    return len(levels)


@dataclass
class ColumnLayout:
    n: int
    intervals: dict  # level -> (lo, hi), exact rationals
    copies: dict  # c in C_n -> list of levels i + c (stage >= 1)

    def total(self):
        return max(hi for _, hi in self.intervals.values())


def columns(T, N):
    """Stage-by-stage interval layouts for n = 0..N."""
    assert isinstance(T.ctx, IntLine)
    out = [ColumnLayout(n=0, intervals={0: (Fraction(0), Fraction(1))}, copies={})]
    for n in range(1, N + 1):
        prev = out[-1]
        h_prev = height(T, n - 1)
        h_n = height(T, n)
        kap = T.kappa(n)
        nun = T.nu(n)
        cs = sorted(T.C(n))
        intervals = {}
        copies = {}
        for i in range(h_prev):
            lo, hi = prev.intervals[i]
            cur = lo
            for c in cs:
                w = (hi - lo) * kap.weight(c)
                assert w == nun.weight(i + c), (n, i, c)
                intervals[i + c] = (cur, cur + w)
                cur += w
            assert cur == hi
        for c in cs:
            copies[c] = [i + c for i in range(h_prev)]
        cur = T.nu(n - 1).total
        spacers = [j for j in range(h_n) if j not in intervals]
        for j in spacers:
            w = nun.weight(j)
            intervals[j] = (cur, cur + w)
            cur += w
        assert cur == nun.total
        assert len(intervals) == h_n
        out.append(ColumnLayout(n=n, intervals=intervals, copies=copies))
    return out


def spacer_map(T, n):
    """Spacer counts entered above each copy at stage n (needs an aligned top).

    s(c) = gap to the next copy of the stage-(n-1) column; for the last copy
    the gap runs to the top of stage n, which must be 0 under the aligned-top
    normalization max F_n = max F_{n-1} + max C_n.
    """
    h_prev = height(T, n - 1)
    h_n = height(T, n)
    cs = sorted(T.C(n))
    out = {}
    for c, c_next in zip(cs, cs[1:]):
        out[c] = c_next - c - h_prev
    out[cs[-1]] = h_n - cs[-1] - h_prev
    assert all(v >= 0 for v in out.values()), out
    return out


def top_aligned(T, n):
    """max F_n = max F_{n-1} + max C_n: no spacers above the last copy."""
    return spacer_map(T, n)[max(T.C(n))] == 0


def induced_base(T, x):
    """The base-set return map and the spacer count crossed on the way.

    x must be a base-level-0 point.  At the first non-maximal coordinate k,
    the return resets the earlier coordinates to 0, bumps c_k to its
    successor, and crosses s_k(c_k) spacer levels: return time 1 + theta.
    """
    assert x.n == 0 and x.f == T.ctx.identity
    check_point(T, x)
    for i, c in enumerate(x.tail):
        n = i + 1
        cs = sorted(T.C(n))
        assert top_aligned(T, n), "needs the aligned-top normalization"
        if c != cs[-1]:
            succ = cs[cs.index(c) + 1]
            tail = (0,) * i + (succ,) + x.tail[n:]
            theta = spacer_map(T, n)[c]
            return CFPoint(0, 0, tail), theta
    raise NeedsDeeperTail("all known coordinates are maximal (top orbit)")


def _sumsets(T, depth):
    out = [frozenset([0])]
    for n in range(1, depth + 1):
        out.append(frozenset(s + c for s in out[-1] for c in T.C(n)))
    return out


def decompose_base(T, f, m, sums=None):
    """Unique coordinates (c_1..c_m) with sum f, or None if f has a spacer."""
    if sums is None:
        sums = _sumsets(T, m)
    if m == 0:
        return () if f == 0 else None
    for c in sorted(T.C(m)):
        if f - c in sums[m - 1]:
            rest = decompose_base(T, f - c, m - 1, sums)
            if rest is not None:
                return rest + (c,)
    return None


def first_return_oracle(T, x, step_cap=4096):
    """Step the +1 translation until the orbit re-enters the base set.

    Returns (steps, point-as-based-at-0).  Independent of the spacer-count
    bookkeeping: this literally walks the orbit.
    """
    assert x.n == 0 and x.f == T.ctx.identity
    y = x
    sums = _sumsets(T, x.depth())
    for step in range(1, step_cap + 1):
        y = act(T, 1, y)
        coords = decompose_base(T, y.f, y.n, sums)
        if coords is not None:
            return step, CFPoint(0, 0, coords + y.tail)
    raise NeedsDeeperTail("no return within %d steps" % step_cap)


def render_svg(T, N, width=900, row_height=26, gap=14):
    """Deterministic picture of the stage layouts; exact masses ride along
    as data attributes, coordinates are display-only."""
    layouts = columns(T, N)
    scale = max(layout.total() for layout in layouts)
    rows = []
    for k, layout in enumerate(layouts):
        y0 = k * (row_height + gap)
        rects = []
        for level in sorted(layout.intervals):
            lo, hi = layout.intervals[level]
            x0 = float(lo / scale) * (width - 2)
            w = float((hi - lo) / scale) * (width - 2)
            rects.append(
                '<rect x="%.4f" y="%d" width="%.4f" height="%d" '
                'fill="none" stroke="black" data-level="%d" '
                'data-lo="%d/%d" data-hi="%d/%d"/>'
                % (1 + x0, y0, w, row_height, level,
                   lo.numerator, lo.denominator, hi.numerator, hi.denominator)
            )
        rows.append('<g data-stage="%d">%s</g>' % (layout.n, "".join(rects)))
    total_h = len(layouts) * (row_height + gap)
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">%s</svg>'
        % (width, total_h, "".join(rows))
    )
