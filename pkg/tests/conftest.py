import random
from fractions import Fraction

import pytest

from cfforge import catalog
from cfforge.groups import IntLine
from cfforge.measures import FinMeasure
from cfforge.cfcore import CFParams, CFPoint, rebase


@pytest.fixture(scope="session")
def fgsw():
    return catalog.catalog("fgsw")


@pytest.fixture(scope="session")
def heis():
    return catalog.catalog("heisenberg-rank-one")


@pytest.fixture(scope="session")
def z2chain():
    from cfforge.odometers import OdometerSpec
    from cfforge.groups import ZModulus

    ctx = IntLine()
    return OdometerSpec(ctx, lambda S, n: ZModulus(ctx, 2 ** n),
                        depth_cap=12, name="z2")


def sorted_copies(T, n):
    return sorted(T.C(n), key=T.ctx.key)


def sample_point(T, rng, depth, base=0):
    tail = tuple(rng.choice(sorted_copies(T, n))
                 for n in range(base + 1, depth + 1))
    return CFPoint(base, T.ctx.identity, tail)


def points_equal(T, x, y):
    m = max(x.n, y.n)
    if x.depth() < m or y.depth() < m:
        return False
    a, b = rebase(T, x, m), rebase(T, y, m)
    d = min(len(a.tail), len(b.tail))
    return a.f == b.f and a.tail[:d] == b.tail[:d]


def weighted_fgsw(weight_rows, spacer_unit=Fraction(1, 64)):
    """fgsw shapes with arbitrary positive stage weights; spacer levels get
    small fixed masses so every level weight stays positive."""
    ctx = IntLine()
    depth = len(weight_rows)
    Cs, Fs, kappas, nus = [], [], [], []
    prev_nu = {0: Fraction(1)}
    for i, row in enumerate(weight_rows):
        n = i + 1
        C = catalog.fgsw_copy_set(n)
        total = sum(row)
        kap = FinMeasure.from_weights(
            ctx, {c: Fraction(w, total) for c, w in zip(C, row)})
        h = catalog.fgsw_height(n)
        atoms = {}
        for f, wf in prev_nu.items():
            for c in C:
                atoms[f + c] = wf * kap.weight(c)
        for j in range(h):
            if j not in atoms:
                atoms[j] = spacer_unit ** n
        Cs.append(C)
        Fs.append(range(h))
        kappas.append(kap)
        nus.append(FinMeasure(ctx, atoms))
        prev_nu = atoms
    return CFParams.explicit(ctx, Cs, Fs, kappas, nus, name="fgsw-weighted")


@pytest.fixture(scope="session")
def rng():
    return random.Random(20260823)
