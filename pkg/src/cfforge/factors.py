"""Factor maps onto finite coset spaces, and scans for them.

The point (n, f, tail) maps to the eventually-constant coset (f c_{n+1}
... c_m g) Gamma when the tail masses outside the right conjugates are
summable.  Three tools:

  * coset_compatibility: per-stage escape masses and their verdict;
  * finite_factor_map: evaluate the map on a point and report stabilization;
  * finite_factor_scan: search growing stage windows for a coset path whose
    escape masses fall under 2^-1, 2^-2, ...; failure reports the exact
    per-window minima over all candidate coset pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groups import ConjugatedBy, coset_table
from .measures import UniformMeasure
from .cfcore import (
    DEFAULT_THRESHOLD,
    DIVERGENT,
    NeedsDeeperTail,
    Verdict,
    act,
    rebase,
    series_verdict,
)


def conj_subgroup(Gamma, g):
    if g == Gamma.ctx.identity:
        return Gamma
    return ConjugatedBy(Gamma, g)


def coset_compatibility(T, Gamma, g=None, depth=12, threshold=DEFAULT_THRESHOLD):
    """Per-stage masses kappa_n({c outside g Gamma g^-1}) with a verdict."""
    ctx = T.ctx
    if g is None:
        g = ctx.identity
    sub = conj_subgroup(Gamma, g)
    depth = min(depth, T.depth_cap)
    terms = [T.kappa(n).mass(lambda c: not sub.member(c))
             for n in range(1, depth + 1)]
    return terms, series_verdict(terms, threshold,
                                 note="escape masses outside the conjugate")


def finite_factor_map(T, space, x, g=None, window=3):
    """Trace of cosets (f_m g) Gamma along the known tail of x.

    Returns (coset index or None, trace); the index is reported only when
    the last `window` trace entries agree.
    """
    ctx = T.ctx
    if g is None:
        g = ctx.identity
    f = x.f
    trace = [space.locate(ctx.mul(f, g))]
    for c in x.tail:
        f = ctx.mul(f, c)
        trace.append(space.locate(ctx.mul(f, g)))
    if len(trace) >= window and len(set(trace[-window:])) == 1:
        return trace[-1], trace
    return None, trace


def check_equivariance(T, space, h, x, g=None, window=3):
    """map(h.x) should be the h-translate of map(x); None when unstabilized."""
    jx, _ = finite_factor_map(T, space, x, g=g, window=window)
    if jx is None:
        return None
    hx = act(T, h, x)
    jhx, _ = finite_factor_map(T, space, hx, g=g, window=window)
    if jhx is None:
        return None
    want = space.locate(T.ctx.mul(h, space.reps[jx]))
    return jhx == want


def default_schedule(max_depth):
    """Boundaries 0, 1, 3, 6, 10, ... (window n has n+1 stages), clipped."""
    qs = [0]
    k = 0
    while True:
        nxt = qs[-1] + k + 1
        if nxt > max_depth:
            break
        qs.append(nxt)
        k += 1
    assert len(qs) >= 2, "probe depth too small for a single window"
    return tuple(qs)


@dataclass
class FactorScanReport:
    passes: bool
    schedule: tuple
    start: Optional[int] = None
    path: Optional[tuple] = None
    coset_index: Optional[int] = None
    telescoping: Optional[tuple] = None
    path_masses: Optional[tuple] = None
    minima: tuple = ()
    verdict: Optional[Verdict] = None

    def to_json(self):
        from .measures import fmt_frac

        return {
            "passes": self.passes,
            "schedule": list(self.schedule),
            "start": self.start,
            "path": list(self.path) if self.path is not None else None,
            "coset_index": self.coset_index,
            "telescoping": list(self.telescoping) if self.telescoping else None,
            "path_masses": [fmt_frac(m) for m in self.path_masses or ()],
            "window_minima": [fmt_frac(m) for m in self.minima],
            "verdict": self.verdict.to_json() if self.verdict else None,
        }


def finite_factor_scan(T, Gamma, space=None, max_depth=10, schedule=None,
                       min_windows=2, threshold=DEFAULT_THRESHOLD):
    """Hunt for a coset path with window escape masses under 2^-1, 2^-2, ...

    Window k spans stages (q_k, q_{k+1}].  An edge between transversal
    entries i -> j weighs the window mass of {c : (r_i c) Gamma != r_j Gamma}.
    Success needs some start window N and a path across all later windows
    with the k-th mass (counted from N) strictly under 2^-(k+1); the
    telescoping regrouping and the base coset are read off the path.
    """
    ctx = T.ctx
    if space is None:
        space = coset_table(ctx, Gamma)
    qs = tuple(schedule) if schedule is not None else default_schedule(max_depth)
    assert qs[0] == 0 and all(a < b for a, b in zip(qs, qs[1:]))
    assert qs[-1] <= T.depth_cap
    reps = space.reps
    R = len(reps)
    K = len(qs) - 1

    # edge masses per window: 1 - (mass of c with (r_i c) in coset j)
    edges = []
    for k in range(K):
        kap = T.kappa(qs[k] + 1)
        if isinstance(kap, UniformMeasure):
            kap = kap.to_explicit()
        for m in range(qs[k] + 2, qs[k + 1] + 1):
            kap = kap.convolve(T.kappa(m))
        mat = [[Fraction(1)] * R for _ in range(R)]
        for i in range(R):
            for c, w in kap.atoms.items():
                j = space.locate(ctx.mul(reps[i], c))
                mat[i][j] -= w
        edges.append(mat)

    minima = tuple(min(min(row) for row in mat) for mat in edges)

    best = None
    for N in range(0, K - min_windows + 1):
        # feasibility from the back, then lexicographically least path
        ok = [[False] * R for _ in range(K - N + 1)]
        ok[K - N] = [True] * R
        for k in range(K - 1, N - 1, -1):
            bound = Fraction(1, 2 ** (k - N + 1))
            for i in range(R):
                ok[k - N][i] = any(
                    edges[k][i][j] < bound and ok[k - N + 1][j]
                    for j in range(R)
                )
        starts = [i for i in range(R) if ok[0][i]]
        if not starts:
            continue
        path = [min(starts)]
        for k in range(N, K):
            bound = Fraction(1, 2 ** (k - N + 1))
            i = path[-1]
            j = min(
                j for j in range(R)
                if edges[k][i][j] < bound and ok[k - N + 1][j]
            )
            path.append(j)
        best = (N, tuple(path))
        break

    if best is None:
        return FactorScanReport(
            passes=False,
            schedule=qs,
            minima=minima,
            verdict=series_verdict(minima, threshold,
                                   note="window minima over all coset pairs"),
        )
    N, path = best
    masses = tuple(edges[k][path[k - N]][path[k - N + 1]] for k in range(N, K))
    tele = (0,) + qs[N:] if qs[N] != 0 else qs[N:]
    return FactorScanReport(
        passes=True,
        schedule=qs,
        start=N,
        path=path,
        coset_index=space.locate(ctx.inv(reps[path[0]])),
        telescoping=tele,
        path_masses=masses,
        minima=minima,
        verdict=series_verdict(masses, threshold, note="masses along the path"),
    )


def total_ergodicity_scan(T, targets, max_depth=10, threshold=DEFAULT_THRESHOLD):
    """Run the factor scan against each named subgroup; all-refuted means no
    finite coset factor was found in the probed family."""
    reports = {}
    for name, Gamma in targets:
        reports[name] = finite_factor_scan(T, Gamma, max_depth=max_depth,
                                           threshold=threshold)
    return {
        "reports": reports,
        "all_refuted": all(not r.passes for r in reports.values()),
    }


# ---------------------------------------------------------------------------
# sum-splitting of stages (C_n = C1_n + C2_n) and the partial-sum factor
# ---------------------------------------------------------------------------

@dataclass
class SumSplit:
    """Per-stage additive splitting over the integers with split weights."""

    c1_rule: object  # n -> iterable
    c2_rule: object  # n -> iterable
    kappa1_rule: object  # n -> FinMeasure
    kappa2_rule: object  # n -> FinMeasure

    def C1(self, n):
        return sorted(self.c1_rule(n))

    def C2(self, n):
        return sorted(self.c2_rule(n))


def check_sum_split(T, split, depth):
    """Each C_n must be the bijective sumset C1_n + C2_n and kappa_n the
    convolution of the split weights.  Exact; raises on violation."""
    ctx = T.ctx
    for n in range(1, depth + 1):
        c1, c2 = split.C1(n), split.C2(n)
        sums = {}
        for a in c1:
            for b in c2:
                s = a + b
                assert s not in sums, "sumset collision at stage %d" % n
                sums[s] = (a, b)
        assert set(sums) == set(T.C(n)), "sumset is not C_%d" % n
        k1, k2 = split.kappa1_rule(n), split.kappa2_rule(n)
        assert k1.convolve(k2) == T.kappa(n), "split weights at stage %d" % n
    return True


def split_coordinates(T, split, x):
    """Decompose each known coordinate of x as (c1_m, c2_m)."""
    assert x.n == 0, "decomposition starts from the base level"
    out = []
    for i, c in enumerate(x.tail):
        n = i + 1
        found = None
        for a in split.C1(n):
            for b in split.C2(n):
                if a + b == c:
                    assert found is None
                    found = (a, b)
        assert found is not None, (n, c)
        out.append(found)
    return tuple(out)


def partial_sum_bijection(split, n, modulus):
    """The map (c1_1, ..., c1_n) -> sum mod `modulus` must be a bijection."""
    import itertools

    vals = set()
    count = 1
    for m in range(1, n + 1):
        count *= len(split.C1(m))
    assert count == modulus
    for tup in itertools.product(*[split.C1(m) for m in range(1, n + 1)]):
        vals.add(sum(tup) % modulus)
    return len(vals) == modulus


def split_factor_value(T, split, x, n, modulus):
    """Partial-sum factor value at level n: the C1 sums plus the still
    visible C2 terms (those whose stage m has 2m < n), mod `modulus`."""
    coords = split_coordinates(T, split, x)
    assert len(coords) >= n
    val = sum(c1 for c1, _ in coords[:n])
    val += sum(c2 for m, (_, c2) in enumerate(coords, start=1) if 2 * m < n)
    return val % modulus
