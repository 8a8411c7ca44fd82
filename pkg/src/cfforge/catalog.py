"""Named parameter sets, subgroup chains, and finite scenarios.

Every entry is a zero-argument builder returning the natural object:
stage parameters (CFParams), a subgroup chain (OdometerSpec), a sum
splitting, or a finite group scenario.  Heights and copy sets are exact
integers; weights are exact rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .groups import (
    BoxSet,
    ExplicitSet,
    FiniteSubset,
    FiniteTable,
    Heisenberg,
    HeisenbergCongruence,
    IntLine,
    IntervalSet,
    TreeDepth,
    ZModulus,
)
from .measures import FinMeasure
from .cfcore import CFParams
from .factors import SumSplit
from .odometers import OdometerSpec


# ---------------------------------------------------------------------------
# rank-one Z-action with heights 1, 6, 28, 120, ... (h' = 4h + 2^(n+1))
# ---------------------------------------------------------------------------

def fgsw_height(n):
    # closed form 2^n (2^(n+1) - 1); satisfies h' = 4h + 2^(n+1) with h(0)=1
    h = (1 << n) * ((1 << (n + 1)) - 1)
    assert n == 0 or h == 4 * fgsw_height(n - 1) + (1 << n)
    return h


def fgsw_copy_set(n):
    hp = fgsw_height(n - 1)
    out = (0, hp, 2 * hp + (1 << n), 3 * hp + (1 << n))
    assert out[2] == 4 ** n  # the copy that obstructs odd-modulus factors
    return out


def fgsw():
    ctx = IntLine()
    return CFParams.haar_style(
        ctx,
        lambda T, n: ExplicitSet(ctx, fgsw_copy_set(n)),
        lambda T, n: IntervalSet(fgsw_height(n)),
        name="fgsw",
        depth_cap=24,
    )


def fgsw_split(kappa2_weight=None):
    """Stage splitting C_n = {0, h_{n-1}} + {0, 4^n} with split weights.

    kappa2_weight(n) gives the mass of 4^n under the second factor
    (default 1/2); the first factor stays uniform so the convolution is
    the parameter weight only in the uniform case.
    """
    ctx = IntLine()

    def w2(n):
        return Fraction(1, 2) if kappa2_weight is None else kappa2_weight(n)

    return SumSplit(
        c1_rule=lambda n: (0, fgsw_height(n - 1)),
        c2_rule=lambda n: (0, 4 ** n),
        kappa1_rule=lambda n: FinMeasure.uniform(ctx, (0, fgsw_height(n - 1))),
        kappa2_rule=lambda n: FinMeasure.from_weights(
            ctx, {0: 1 - w2(n), 4 ** n: w2(n)}
        ),
    )


# ---------------------------------------------------------------------------
# rank-one action of the integer unipotent group
# ---------------------------------------------------------------------------

def heisenberg_height(n):
    # closed form 4^(2n+1) - 3*4^n; satisfies h' = 16h + 9*4^(n+1), h(0)=1
    h = 4 ** (2 * n + 1) - 3 * 4 ** n
    assert n == 0 or h == 16 * heisenberg_height(n - 1) + 9 * 4 ** n
    return h


def heisenberg_copy_set(ctx, n):
    s = 1 << (n - 1)
    hp = heisenberg_height(n - 1)
    big = 8 * hp + 2 * 4 ** n
    out = []
    for a in (0, s):
        for b in (0, s):
            for e in (0, 1):
                for j in range(8):
                    out.append(ctx.mul((a, b, 0), (0, 0, j * hp + e * big)))
    assert len(set(out)) == 64
    return out


def heisenberg_rank_one():
    ctx = Heisenberg()
    return CFParams.haar_style(
        ctx,
        lambda T, n: ExplicitSet(ctx, heisenberg_copy_set(ctx, n)),
        lambda T, n: BoxSet(1 << n, 1 << n, heisenberg_height(n)),
        name="heisenberg-rank-one",
        depth_cap=12,
    )


def heisenberg_2adic_chain():
    ctx = Heisenberg()
    return OdometerSpec(
        ctx,
        lambda S, n: HeisenbergCongruence(ctx, 1 << n, 1 << n, 1 << n),
        depth_cap=16,
        name="heisenberg-2adic-chain",
    )


def heisenberg_nonnormal():
    """Chain (i*2^(n-1), j*2^n, k*2^n): non-normal, with diagonal cores."""
    ctx = Heisenberg()
    return OdometerSpec(
        ctx,
        lambda S, n: HeisenbergCongruence(ctx, 1 << (n - 1), 1 << n, 1 << n),
        depth_cap=16,
        name="heisenberg-nonnormal",
        core_hint=lambda S, n: HeisenbergCongruence(ctx, 1 << n, 1 << n, 1 << n),
    )


# ---------------------------------------------------------------------------
# order-6 semidirect product acting on the off-diagonal pairs of a 3-point
# quotient: two distinct 2-to-1 equivariant coordinate projections
# ---------------------------------------------------------------------------

def _semidirect_3_2():
    # (a, e) with product (a + (-1)^e a', e + e'); index = a + 3e
    def idx(a, e):
        return a % 3 + 3 * (e % 2)

    table = [[0] * 6 for _ in range(6)]
    for a in range(3):
        for e in range(2):
            for a2 in range(3):
                for e2 in range(2):
                    a3 = a + (a2 if e == 0 else -a2)
                    table[idx(a, e)][idx(a2, e2)] = idx(a3, e + e2)
    return FiniteTable(table, generators=(idx(1, 0), idx(0, 1)),
                       names=("e", "r", "r2", "s", "rs", "r2s"))


@dataclass
class FiniteScenario:
    ctx: FiniteTable
    gamma: FiniteSubset
    points: tuple  # pairs (j, k) of quotient classes, diagonal removed

    def quotient_act(self, g, j):
        a, e = g % 3, g // 3
        return (a + (j if e == 0 else -j)) % 3

    def act(self, g, y):
        return (self.quotient_act(g, y[0]), self.quotient_act(g, y[1]))

    def orbit(self, y):
        return frozenset(self.act(g, y) for g in self.ctx.elements())

    def stabilizer(self, y):
        return tuple(g for g in self.ctx.elements() if self.act(g, y) == y)

    def projection_partition(self, coord):
        classes = {}
        for y in self.points:
            classes.setdefault(y[coord], []).append(y)
        return frozenset(frozenset(v) for v in classes.values())


def s3_two_factors():
    ctx = _semidirect_3_2()
    gamma = FiniteSubset(ctx, (0, 3))  # {identity, flip}: index 3, non-normal
    points = tuple(
        (j, k) for j in range(3) for k in range(3) if j != k
    )
    scen = FiniteScenario(ctx=ctx, gamma=gamma, points=points)
    # the pair coordinates really are the gamma-coset classes
    for g in ctx.elements():
        assert gamma.coset_key(g) == gamma.coset_key(g % 3)
    return scen


# ---------------------------------------------------------------------------
# integer odometer chain with mixed moduli
# ---------------------------------------------------------------------------

def z_product_odometer(ratios=None):
    """Chain a_1 ... a_n Z; default ratio pattern 2, 3, 2, 3, ..."""
    ctx = IntLine()
    if ratios is None:
        ratios = lambda n: 2 if n % 2 == 1 else 3

    def modulus(n):
        m = 1
        for k in range(1, n + 1):
            m *= ratios(k)
        return m

    return OdometerSpec(
        ctx,
        lambda S, n: ZModulus(ctx, modulus(n)),
        depth_cap=16,
        name="z-product-odometer",
    )


# ---------------------------------------------------------------------------
# finite tree group with point-stabilizer chain: the odometer is not free
# ---------------------------------------------------------------------------

def _tree_stabilizer(ctx, n, pointwise_levels=False):
    """Stabilizer of the all-zero prefix of length n; with pointwise_levels,
    every node of depth < n must be unswapped (the normal core)."""
    fixed = set()
    for k in range(n):
        if pointwise_levels:
            for w in itertools.product((0, 1), repeat=k):
                fixed.add(ctx.node(w))
        else:
            fixed.add(ctx.node((0,) * k))
    elems = [g for g in ctx.elements() if all(g[i] == 0 for i in fixed)]
    return FiniteSubset(ctx, elems, check_closed=False)


def tree_nonfree(depth=3):
    ctx = TreeDepth(depth)
    spec = OdometerSpec(
        ctx,
        lambda S, n: _tree_stabilizer(ctx, n),
        depth_cap=depth,
        name="tree-nonfree",
        core_hint=lambda S, n: _tree_stabilizer(ctx, n, pointwise_levels=True),
    )
    return spec


def tree_nonfree_witness(ctx):
    """Nonidentity element fixing the all-zero ray: swap below the 1-child
    of the root only.  It sits in every stabilizer of the chain."""
    g = [0] * ctx.size
    g[ctx.node((1,))] = 1
    R = tuple(g)
    assert ctx.apply(R, (0,) * ctx.depth) == (0,) * ctx.depth
    assert R != ctx.identity
    return R


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

ENTRIES = {
    "fgsw": {"kind": "params", "build": fgsw,
             "doc": "rank-one integer action, heights 1, 6, 28, 120, ..."},
    "fgsw-split": {"kind": "split", "build": fgsw_split,
                   "doc": "stage splitting {0,h}+{0,4^n} with split weights"},
    "heisenberg-rank-one": {
        "kind": "params", "build": heisenberg_rank_one,
        "doc": "rank-one action of the integer unipotent group on boxes"},
    "heisenberg-2adic-chain": {
        "kind": "chain", "build": heisenberg_2adic_chain,
        "doc": "diagonal congruence chain (2^n, 2^n, 2^n)"},
    "heisenberg-nonnormal": {
        "kind": "chain", "build": heisenberg_nonnormal,
        "doc": "non-normal chain (2^(n-1), 2^n, 2^n) with index-2 cores"},
    "s3-two-factors": {
        "kind": "scenario", "build": s3_two_factors,
        "doc": "order-6 group on off-diagonal pairs: two distinct projections"},
    "z-product-odometer": {
        "kind": "chain", "build": z_product_odometer,
        "doc": "integer chain a_1...a_n Z, ratio pattern 2, 3, 2, 3, ..."},
    "tree-nonfree": {
        "kind": "chain", "build": tree_nonfree,
        "doc": "depth-3 tree group, point-stabilizer chain, non-free witness"},
}


def catalog(name):
    assert name in ENTRIES, "unknown catalog entry %r" % name
    return ENTRIES[name]["build"]()


def names():
    return sorted(ENTRIES)
